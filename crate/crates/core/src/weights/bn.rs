//! Distance-weighted influence weights from a DAG with arc strengths.
//!
//! For dimension `X` and target `T`, every node-simple directed path
//! `p: X ⇝ T` contributes according to its strength `σ_p`, the product of
//! its arc strengths, and its length `|p|` in arcs:
//!
//! * literal mode: `σ_p ^ |p|`
//! * dwi(d) mode: `σ_p · d ^ |p|`, `d ∈ (0, 1]`
//!
//! A dimension's raw weight is the sum over its paths; dimensions with no
//! path to the target get exactly 0.

use super::{normalize, Scheme, WeightVector};
use crate::ensemble::StrengthMap;
use crate::error::{Error, Result};
use crate::graph::{Dag, Path};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BnMode {
    Literal,
    Dwi(f64),
}

impl BnMode {
    fn validate(self) -> Result<()> {
        match self {
            BnMode::Literal => Ok(()),
            BnMode::Dwi(d) if d > 0.0 && d <= 1.0 => Ok(()),
            BnMode::Dwi(d) => Err(Error::InvalidArgument(format!("discount must lie in (0, 1], got {d}"))),
        }
    }

    fn contribution(self, sigma: f64, length: usize) -> f64 {
        let len = i32::try_from(length).expect("path length fits in i32");
        match self {
            BnMode::Literal => sigma.powi(len),
            BnMode::Dwi(d) => sigma * d.powi(len),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathContribution {
    pub path: Path,
    pub sigma: f64,
    pub length: usize,
    pub contribution: f64,
}

/// Paths from `dim` to `target` with their contributions, in lexicographic
/// node-name order.
pub fn path_contributions(
    g: &Dag,
    s: &StrengthMap,
    dim: &str,
    target: &str,
    mode: BnMode,
) -> Result<Vec<PathContribution>> {
    mode.validate()?;
    let u = g.require(dim)?;
    let t = g.require(target)?;
    contributions(g, s, u, t, mode)
}

fn contributions(g: &Dag, s: &StrengthMap, u: usize, t: usize, mode: BnMode) -> Result<Vec<PathContribution>> {
    g.paths_between(u, t)
        .into_iter()
        .map(|path| {
            let mut sigma = 1.0;
            for (a, b) in path.arcs() {
                let (from, to) = (g.name(a), g.name(b));
                sigma *= s.get(from, to).ok_or_else(|| Error::MissingStrength {
                    from: from.to_string(),
                    to: to.to_string(),
                })?;
            }
            let length = path.len();
            Ok(PathContribution {
                contribution: mode.contribution(sigma, length),
                path,
                sigma,
                length,
            })
        })
        .collect()
}

/// Normalized BN weights of `dims` toward `target`.
pub fn bn_weights(g: &Dag, s: &StrengthMap, target: &str, dims: &[String], mode: BnMode) -> Result<WeightVector> {
    mode.validate()?;
    let t = g.require(target)?;
    if dims.is_empty() {
        return Err(Error::InvalidArgument("no dimensions".into()));
    }
    let mut raw = Vec::with_capacity(dims.len());
    for d in dims {
        let u = g.require(d)?;
        if u == t {
            return Err(Error::InvalidArgument(format!("target {target} listed as a dimension")));
        }
        let w: f64 = contributions(g, s, u, t, mode)?.iter().map(|c| c.contribution).sum();
        raw.push((d.clone(), w));
    }
    let mut vector = WeightVector::new(Scheme::Bn, raw)?;
    let unreachable: Vec<&str> = vector
        .weights()
        .iter()
        .filter(|(_, w)| *w == 0.0)
        .map(|(n, _)| n.as_str())
        .collect();
    if !unreachable.is_empty() {
        vector.flags.push(format!("zero influence on {target}: {}", unreachable.join(", ")));
    }
    normalize(&vector)
}
