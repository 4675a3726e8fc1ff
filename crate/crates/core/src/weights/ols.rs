//! Regression weights: absolute standardized least-squares coefficients of
//! the target's achievement score on the dimensions' scores.

use nalgebra::{DMatrix, DVector};

use super::{name_sorted_positions, normalize, resolve_roles, Scheme, WeightVector};
use crate::dataset::{Dataset, ScoreMapping};
use crate::error::{Error, Result};

fn standardize(x: &mut [f64]) -> bool {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if !(var > 0.0) {
        return false;
    }
    let sd = var.sqrt();
    x.iter_mut().for_each(|v| *v = (*v - mean) / sd);
    true
}

pub fn ols_weights(data: &Dataset, target: &str, dims: &[String]) -> Result<WeightVector> {
    let (t, idx) = resolve_roles(data, target, dims)?;
    let n = data.n();
    let d = idx.len();
    if n <= d {
        return Err(Error::InvalidArgument(format!(
            "regression needs more rows ({n}) than dimensions ({d})"
        )));
    }
    let mapping = ScoreMapping::from_schema(data.schema());
    let order = name_sorted_positions(dims);

    let mut columns = Vec::with_capacity(d);
    for &p in &order {
        let mut col = data.variable_scores(idx[p], &mapping)?;
        if !standardize(&mut col) {
            return Err(Error::RankDeficient {
                columns: vec![dims[p].clone()],
            });
        }
        columns.push(col);
    }
    let mut y = data.variable_scores(t, &mapping)?;
    if !standardize(&mut y) {
        return Err(Error::InvalidArgument(format!("target {target} is constant")));
    }

    let x = DMatrix::from_fn(n, d, |r, c| columns[c][r]);
    let qr = x.qr();
    let r = qr.r();
    let tol = 1e-8 * (n as f64).sqrt();
    if let Some(k) = (0..d).find(|&k| r[(k, k)].abs() <= tol) {
        // column k is (numerically) a combination of earlier columns
        let lead = r.view((0, 0), (k, k)).into_owned();
        let rhs = r.view((0, k), (k, 1)).column(0).into_owned();
        let mut names = vec![dims[order[k]].clone()];
        if let Some(coef) = lead.solve_upper_triangular(&rhs) {
            for (j, c) in coef.iter().enumerate() {
                if c.abs() > 1e-6 {
                    names.push(dims[order[j]].clone());
                }
            }
        }
        names.sort();
        return Err(Error::RankDeficient { columns: names });
    }
    let qty = qr.q().transpose() * DVector::from_vec(y);
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient { columns: dims.to_vec() })?;

    let mut raw = vec![(String::new(), 0.0); d];
    for (k, &p) in order.iter().enumerate() {
        raw[p] = (dims[p].clone(), beta[k].abs());
    }
    normalize(&WeightVector::new(Scheme::Ols, raw)?)
}
