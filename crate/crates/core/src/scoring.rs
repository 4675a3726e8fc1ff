//! Decomposable network scores over categorical data.
//!
//! All scores use natural logs and are oriented so that larger is better.
//! For a node with `r` categories and parent configurations `j`:
//!
//! * `LL  = Σ_j Σ_k N_jk ln(N_jk / N_j)` (empty cells contribute 0)
//! * `BIC = LL - k ln(n) / 2`, `AIC = LL - k`, with `k = (r - 1) q` and
//!   `q` the number of parent configurations (observed or not)
//! * `K2  = Σ_j [ lnΓ(r) - lnΓ(N_j + r) + Σ_k lnΓ(N_jk + 1) ]`

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use statrs::function::gamma::ln_gamma;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::Dag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScoreType {
    Bic,
    Aic,
    K2,
}

impl ScoreType {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreType::Bic => "bic",
            ScoreType::Aic => "aic",
            ScoreType::K2 => "k2",
        }
    }
}

impl fmt::Display for ScoreType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScoreType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bic" => Ok(ScoreType::Bic),
            "aic" => Ok(ScoreType::Aic),
            "k2" => Ok(ScoreType::K2),
            other => Err(Error::InvalidArgument(format!("unknown score {other:?}"))),
        }
    }
}

/// Local score of `node` given `parents` (schema indices). Parents are
/// sorted before counting so the result does not depend on their order.
pub(crate) fn compute_local(data: &Dataset, node: usize, parents: &[usize], s: ScoreType) -> f64 {
    let mut sorted = parents.to_vec();
    sorted.sort_unstable();
    compute_sorted(data, node, &sorted, s)
}

fn compute_sorted(data: &Dataset, node: usize, parents: &[usize], s: ScoreType) -> f64 {
    let r = data.schema().cardinality(node);
    let strata = data.strata(parents);
    let mut counts = vec![0u64; strata.observed * r];
    for (&j, &k) in strata.ids.iter().zip(data.column(node)) {
        counts[j as usize * r + k as usize] += 1;
    }
    match s {
        ScoreType::Bic | ScoreType::Aic => {
            let mut ll = 0.0;
            for row in counts.chunks_exact(r) {
                let nj: u64 = row.iter().sum();
                if nj == 0 {
                    continue;
                }
                let nj = nj as f64;
                for &njk in row {
                    if njk > 0 {
                        let njk = njk as f64;
                        ll += njk * (njk / nj).ln();
                    }
                }
            }
            let q: f64 = parents
                .iter()
                .map(|&p| data.schema().cardinality(p) as f64)
                .product();
            let k = (r as f64 - 1.0) * q;
            match s {
                ScoreType::Bic => ll - k * (data.n() as f64).ln() / 2.0,
                _ => ll - k,
            }
        }
        ScoreType::K2 => {
            let rf = r as f64;
            let lg_r = ln_gamma(rf);
            let mut total = 0.0;
            for row in counts.chunks_exact(r) {
                let nj: u64 = row.iter().sum();
                total += lg_r - ln_gamma(nj as f64 + rf);
                for &njk in row {
                    total += ln_gamma(njk as f64 + 1.0);
                }
            }
            total
        }
    }
}

/// Local score by variable name.
pub fn local_score(data: &Dataset, node: &str, parents: &[&str], s: ScoreType) -> Result<f64> {
    let schema = data.schema();
    let v = schema.require(node)?;
    let mut ps = Vec::with_capacity(parents.len());
    for p in parents {
        let idx = schema.require(p)?;
        if idx == v {
            return Err(Error::InvalidArgument(format!("{node} listed among its own parents")));
        }
        if ps.contains(&idx) {
            return Err(Error::InvalidArgument(format!("parent {p} listed twice")));
        }
        ps.push(idx);
    }
    Ok(compute_local(data, v, &ps, s))
}

/// Sum of local scores of every node of `g` given its parents in `g`.
/// Graph nodes are matched to schema variables by name.
pub fn global_score(g: &Dag, data: &Dataset, s: ScoreType) -> Result<f64> {
    let map = g
        .nodes()
        .iter()
        .map(|name| data.schema().require(name))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..g.node_count())
        .map(|v| {
            let parents: Vec<usize> = g.parents(v).iter().map(|&p| map[p]).collect();
            compute_local(data, map[v], &parents, s)
        })
        .sum())
}

type CacheKey = (usize, Vec<usize>, ScoreType);

/// Memo of local scores keyed by (node, sorted parent set, score type).
/// Safe to share between threads; concurrent writers store identical values.
#[derive(Debug, Default)]
pub struct LocalScoreCache {
    map: Mutex<HashMap<CacheKey, f64>>,
    cap: Option<usize>,
}

impl LocalScoreCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// A cache that stops inserting once it holds `cap` entries.
    pub fn with_cap(cap: usize) -> Self {
        LocalScoreCache {
            map: Mutex::new(HashMap::new()),
            cap: Some(cap),
        }
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_compute(
        &self,
        data: &Dataset,
        node: usize,
        parents: &[usize],
        s: ScoreType,
    ) -> f64 {
        let mut sorted = parents.to_vec();
        sorted.sort_unstable();
        let key = (node, sorted, s);
        if let Some(&v) = self.map.lock().expect("cache lock").get(&key) {
            return v;
        }
        let value = compute_sorted(data, node, &key.1, s);
        let mut map = self.map.lock().expect("cache lock");
        if self.cap.map_or(true, |cap| map.len() < cap) {
            map.insert(key, value);
        }
        value
    }
}

/// Score evaluator bound to one dataset and score type.
pub struct Scorer<'a> {
    data: &'a Dataset,
    score: ScoreType,
    cache: Option<LocalScoreCache>,
}

impl<'a> Scorer<'a> {
    pub fn new(data: &'a Dataset, score: ScoreType) -> Self {
        Scorer {
            data,
            score,
            cache: Some(LocalScoreCache::new()),
        }
    }

    pub fn uncached(data: &'a Dataset, score: ScoreType) -> Self {
        Scorer {
            data,
            score,
            cache: None,
        }
    }

    pub fn with_cache(data: &'a Dataset, score: ScoreType, cache: LocalScoreCache) -> Self {
        Scorer {
            data,
            score,
            cache: Some(cache),
        }
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    pub fn score_type(&self) -> ScoreType {
        self.score
    }

    pub fn local(&self, node: usize, parents: &[usize]) -> f64 {
        match &self.cache {
            Some(c) => c.get_or_compute(self.data, node, parents, self.score),
            None => compute_local(self.data, node, parents, self.score),
        }
    }

    /// Global score of a DAG whose node indices are schema indices.
    pub fn global(&self, g: &Dag) -> f64 {
        (0..g.node_count())
            .map(|v| {
                let parents: Vec<usize> = g.parents(v).iter().copied().collect();
                self.local(v, &parents)
            })
            .sum()
    }
}
