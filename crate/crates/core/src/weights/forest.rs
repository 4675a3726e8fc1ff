//! Random-forest importance weights: a bagged regression forest of
//! variance-reduction trees on achievement scores. A dimension's importance
//! is the total squared-error reduction of the splits on it, summed over
//! all trees.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use super::{name_sorted_positions, normalize, resolve_roles, Scheme, WeightVector};
use crate::dataset::{Dataset, ScoreMapping};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct RfConfig {
    pub trees: usize,
    /// Candidate dimensions per split; `None` means `⌈d / 3⌉`.
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for RfConfig {
    fn default() -> Self {
        RfConfig {
            trees: 200,
            mtry: None,
            min_leaf: 5,
            seed: 0,
        }
    }
}

/// One feature as ordered buckets of distinct values.
struct Feature {
    bucket: Vec<u16>,
    buckets: usize,
}

impl Feature {
    fn new(values: &[f64]) -> Self {
        let mut distinct: Vec<f64> = values.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let bucket = values
            .iter()
            .map(|v| distinct.partition_point(|d| d < v) as u16)
            .collect();
        Feature {
            bucket,
            buckets: distinct.len(),
        }
    }
}

struct Split {
    feature: usize,
    /// Rows with bucket <= `upto` go left.
    upto: u16,
    gain: f64,
}

fn best_split(
    rows: &[usize],
    y: &[f64],
    features: &[Feature],
    candidates: &[usize],
    min_leaf: usize,
) -> Option<Split> {
    let n = rows.len() as f64;
    let total: f64 = rows.iter().map(|&r| y[r]).sum();
    let base = total * total / n;
    let mut best: Option<Split> = None;
    let mut counts = Vec::new();
    let mut sums = Vec::new();
    for &f in candidates {
        let feat = &features[f];
        counts.clear();
        counts.resize(feat.buckets, 0usize);
        sums.clear();
        sums.resize(feat.buckets, 0.0f64);
        for &r in rows {
            let b = feat.bucket[r] as usize;
            counts[b] += 1;
            sums[b] += y[r];
        }
        let (mut nl, mut sl) = (0usize, 0.0f64);
        for b in 0..feat.buckets.saturating_sub(1) {
            nl += counts[b];
            sl += sums[b];
            let nr = rows.len() - nl;
            if counts[b] == 0 || nl < min_leaf {
                continue;
            }
            if nr < min_leaf {
                break;
            }
            let sr = total - sl;
            let gain = sl * sl / nl as f64 + sr * sr / nr as f64 - base;
            if best.as_ref().map_or(true, |s| gain > s.gain) {
                best = Some(Split {
                    feature: f,
                    upto: b as u16,
                    gain,
                });
            }
        }
    }
    best.filter(|s| s.gain > 1e-12)
}

fn tree_importance(y: &[f64], features: &[Feature], cfg: &RfConfig, mtry: usize, tree: usize) -> Vec<f64> {
    let n = y.len();
    let d = features.len();
    let mut rng = seed::derived_rng(cfg.seed, &format!("tree-{tree}"));
    let root: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let mut importance = vec![0.0; d];
    let mut stack = vec![root];
    while let Some(rows) = stack.pop() {
        if rows.len() < 2 * cfg.min_leaf {
            continue;
        }
        let mut candidates = sample(&mut rng, d, mtry).into_vec();
        candidates.sort_unstable();
        let Some(split) = best_split(&rows, y, features, &candidates, cfg.min_leaf) else {
            continue;
        };
        importance[split.feature] += split.gain;
        let bucket = &features[split.feature].bucket;
        let (left, right): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&r| bucket[r] <= split.upto);
        stack.push(right);
        stack.push(left);
    }
    importance
}

pub fn rf_weights(data: &Dataset, target: &str, dims: &[String], cfg: &RfConfig) -> Result<WeightVector> {
    if cfg.trees == 0 {
        return Err(Error::InvalidArgument("a forest needs at least one tree".into()));
    }
    if cfg.min_leaf == 0 {
        return Err(Error::InvalidArgument("min_leaf must be at least 1".into()));
    }
    let (t, idx) = resolve_roles(data, target, dims)?;
    let d = idx.len();
    let mtry = cfg.mtry.unwrap_or_else(|| d.div_ceil(3));
    if mtry == 0 || mtry > d {
        return Err(Error::InvalidArgument(format!("mtry must lie in 1..={d}, got {mtry}")));
    }
    let mapping = ScoreMapping::from_schema(data.schema());
    let order = name_sorted_positions(dims);
    let features = order
        .iter()
        .map(|&p| Ok(Feature::new(&data.variable_scores(idx[p], &mapping)?)))
        .collect::<Result<Vec<_>>>()?;
    let y = data.variable_scores(t, &mapping)?;

    let per_tree: Vec<Vec<f64>> = (0..cfg.trees)
        .into_par_iter()
        .map(|i| tree_importance(&y, &features, cfg, mtry, i))
        .collect();
    let mut total = vec![0.0; d];
    for imp in &per_tree {
        for (acc, v) in total.iter_mut().zip(imp) {
            *acc += v;
        }
    }
    let mut raw = vec![(String::new(), 0.0); d];
    for (k, &p) in order.iter().enumerate() {
        raw[p] = (dims[p].clone(), total[k]);
    }
    normalize(&WeightVector::new(Scheme::Rf, raw)?)
}
