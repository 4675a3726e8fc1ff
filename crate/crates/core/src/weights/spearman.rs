//! Rank-correlation weights: `w_i = |ρ_it| + ½ Σ_{j≠i,t} |ρ_ij|` with
//! Spearman's ρ computed as the Pearson correlation of average ranks.

use super::{normalize, resolve_roles, Scheme, WeightVector};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Average (tie-corrected) rank of each category of a variable.
fn category_ranks(column: &[u16], cardinality: usize) -> Vec<f64> {
    let mut counts = vec![0usize; cardinality];
    for &c in column {
        counts[c as usize] += 1;
    }
    let mut below = 0usize;
    counts
        .iter()
        .map(|&k| {
            let r = below as f64 + (k as f64 + 1.0) / 2.0;
            below += k;
            r
        })
        .collect()
}

struct Ranked {
    /// Centred rank per row.
    centred: Vec<f64>,
    var: f64,
}

fn ranked(data: &Dataset, v: usize) -> Ranked {
    let col = data.column(v);
    let ranks = category_ranks(col, data.schema().cardinality(v));
    let mean = (data.n() as f64 + 1.0) / 2.0;
    let centred: Vec<f64> = col.iter().map(|&c| ranks[c as usize] - mean).collect();
    let var = centred.iter().map(|x| x * x).sum();
    Ranked { centred, var }
}

fn correlation(a: &Ranked, b: &Ranked) -> f64 {
    if a.var == 0.0 || b.var == 0.0 {
        return 0.0;
    }
    let cov: f64 = a.centred.iter().zip(&b.centred).map(|(x, y)| x * y).sum();
    (cov / (a.var * b.var).sqrt()).clamp(-1.0, 1.0)
}

/// Spearman correlation matrix of the named variables. A constant variable
/// has correlation 0 with everything (and 1 on the diagonal).
pub fn rank_correlation_matrix(data: &Dataset, vars: &[String]) -> Result<Vec<Vec<f64>>> {
    let idx = vars
        .iter()
        .map(|v| data.schema().require(v))
        .collect::<Result<Vec<_>>>()?;
    let ranked: Vec<Ranked> = idx.iter().map(|&v| ranked(data, v)).collect();
    Ok(matrix(&ranked))
}

fn matrix(ranked: &[Ranked]) -> Vec<Vec<f64>> {
    let k = ranked.len();
    let mut m = vec![vec![0.0; k]; k];
    for i in 0..k {
        m[i][i] = 1.0;
        for j in i + 1..k {
            let r = correlation(&ranked[i], &ranked[j]);
            m[i][j] = r;
            m[j][i] = r;
        }
    }
    m
}

pub fn spearman_weights(data: &Dataset, target: &str, dims: &[String]) -> Result<WeightVector> {
    let (t, idx) = resolve_roles(data, target, dims)?;
    if idx.len() < 2 {
        return Err(Error::InvalidArgument("rank-correlation weights need at least 2 dimensions".into()));
    }
    let mut vars = idx.clone();
    vars.push(t);
    let ranked: Vec<Ranked> = vars.iter().map(|&v| ranked(data, v)).collect();
    let rho = matrix(&ranked);
    let d = idx.len();
    let raw = (0..d)
        .map(|i| {
            let peers: f64 = (0..d).filter(|&j| j != i).map(|j| rho[i][j].abs()).sum();
            (dims[i].clone(), rho[i][d].abs() + 0.5 * peers)
        })
        .collect();
    let mut w = WeightVector::new(Scheme::Spearman, raw)?;
    for (r, &v) in ranked.iter().zip(&vars) {
        if r.var == 0.0 {
            w.flags.push(format!(
                "{} is constant; its correlations are set to 0",
                data.schema().variable(v).name
            ));
        }
    }
    normalize(&w)
}
