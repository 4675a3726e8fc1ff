//! Dimension weighting schemes.
//!
//! Every scheme returns a [`WeightVector`] keyed by dimension name, in the
//! order the dimensions were given, normalized to sum to 1.

mod bn;
mod forest;
mod ols;
mod spearman;

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

pub use bn::{bn_weights, path_contributions, BnMode, PathContribution};
pub use forest::{rf_weights, RfConfig};
pub use ols::ols_weights;
pub use spearman::{rank_correlation_matrix, spearman_weights};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Bn,
    Equal,
    Spearman,
    Ols,
    Rf,
    External,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Equal,
        Scheme::External,
        Scheme::Ols,
        Scheme::Spearman,
        Scheme::Rf,
        Scheme::Bn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Bn => "bn",
            Scheme::Equal => "equal",
            Scheme::Spearman => "spearman",
            Scheme::Ols => "ols",
            Scheme::Rf => "rf",
            Scheme::External => "external",
        }
    }

    /// Column label of the weight table.
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Bn => "BN",
            Scheme::Equal => "EQ",
            Scheme::Spearman => "SP",
            Scheme::Ols => "RE",
            Scheme::Rf => "RF",
            Scheme::External => "EB",
        }
    }

    fn from_label(s: &str) -> Option<Scheme> {
        Scheme::ALL.iter().copied().find(|x| x.label().eq_ignore_ascii_case(s) || x.as_str().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::from_label(s).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown scheme {s:?}; valid: bn, equal (eq), spearman, ols, rf, external"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub scheme: Scheme,
    weights: Vec<(String, f64)>,
    normalized: bool,
    /// Notes on degenerate inputs (for example a constant variable).
    pub flags: Vec<String>,
}

impl WeightVector {
    /// Raw (unnormalized) weights; all must be finite and nonnegative and
    /// names unique.
    pub fn new(scheme: Scheme, weights: Vec<(String, f64)>) -> Result<Self> {
        for (i, (name, w)) in weights.iter().enumerate() {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidArgument(format!("weight of {name} is {w}")));
            }
            if weights[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::InvalidArgument(format!("dimension {name} listed twice")));
            }
        }
        // -0.0 would print as "-0.0"
        let weights = weights.into_iter().map(|(n, w)| (n, w + 0.0)).collect();
        Ok(WeightVector {
            scheme,
            weights,
            normalized: false,
            flags: Vec::new(),
        })
    }

    pub fn weights(&self) -> &[(String, f64)] {
        &self.weights
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn names(&self) -> Vec<&str> {
        self.weights.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.weights.iter().find(|(n, _)| n == name).map(|&(_, w)| w)
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().map(|(_, w)| w).sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Divides by the sum. Idempotent up to rounding.
pub fn normalize(w: &WeightVector) -> Result<WeightVector> {
    let total = w.sum();
    if !(total > 0.0) {
        return Err(Error::AllZeroWeights);
    }
    Ok(WeightVector {
        scheme: w.scheme,
        weights: w.weights.iter().map(|(n, x)| (n.clone(), x / total)).collect(),
        normalized: true,
        flags: w.flags.clone(),
    })
}

pub fn equal_weights(dims: &[String]) -> Result<WeightVector> {
    if dims.is_empty() {
        return Err(Error::InvalidArgument("no dimensions".into()));
    }
    let raw = WeightVector::new(Scheme::Equal, dims.iter().map(|d| (d.clone(), 1.0)).collect())?;
    normalize(&raw)
}

/// Reads `dimension,share` rows (an optional header line is skipped when
/// its second field is not a number) and normalizes the shares.
pub fn external_weights(path: impl AsRef<Path>, dims: &[String]) -> Result<WeightVector> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    external_weights_from_reader(file, dims)
}

pub fn external_weights_from_reader<R: Read>(reader: R, dims: &[String]) -> Result<WeightVector> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut shares: Vec<(String, f64)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line()) as usize;
        if rec.len() != 2 {
            return Err(Error::Parse {
                context: "external weights".into(),
                line,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let share = match rec[1].parse::<f64>() {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::Parse {
                    context: "external weights".into(),
                    line,
                    message: format!("share {:?} is not a number", &rec[1]),
                })
            }
        };
        let name = rec[0].to_string();
        if !dims.contains(&name) {
            return Err(Error::KeyMismatch(format!("external weights list unknown dimension {name}")));
        }
        if !(share.is_finite() && share >= 0.0) {
            return Err(Error::InvalidArgument(format!("share of {name} is {share}")));
        }
        if shares.iter().any(|(n, _)| *n == name) {
            return Err(Error::InvalidArgument(format!("dimension {name} listed twice")));
        }
        shares.push((name, share));
    }
    let ordered = dims
        .iter()
        .map(|d| {
            shares
                .iter()
                .find(|(n, _)| n == d)
                .map(|&(_, s)| (d.clone(), s))
                .ok_or_else(|| Error::KeyMismatch(format!("external weights miss dimension {d}")))
        })
        .collect::<Result<Vec<_>>>()?;
    normalize(&WeightVector::new(Scheme::External, ordered)?)
}

/// Validates target and dimension names against the dataset; returns
/// their schema indices.
pub(crate) fn resolve_roles(data: &Dataset, target: &str, dims: &[String]) -> Result<(usize, Vec<usize>)> {
    if dims.is_empty() {
        return Err(Error::InvalidArgument("no dimensions".into()));
    }
    let schema = data.schema();
    let t = schema.require(target)?;
    let mut idx = Vec::with_capacity(dims.len());
    for d in dims {
        let i = schema.require(d)?;
        if i == t {
            return Err(Error::InvalidArgument(format!("target {target} listed as a dimension")));
        }
        if idx.contains(&i) {
            return Err(Error::InvalidArgument(format!("dimension {d} listed twice")));
        }
        idx.push(i);
    }
    Ok((t, idx))
}

/// Positions of `dims` sorted by name, so order-sensitive numerics see a
/// canonical column order.
pub(crate) fn name_sorted_positions(dims: &[String]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dims.len()).collect();
    order.sort_by(|&a, &b| dims[a].cmp(&dims[b]));
    order
}

/// Weight table: one row per dimension, one column per scheme, values in
/// percent. `decimals` of `None` writes full precision.
pub fn weights_table_csv(vectors: &[WeightVector], dims: &[String], decimals: Option<usize>) -> Result<String> {
    let mut out = String::from("dimension");
    for v in vectors {
        if !v.is_normalized() {
            return Err(Error::InvalidArgument(format!("{} weights are not normalized", v.scheme)));
        }
        out.push(',');
        out.push_str(v.scheme.label());
    }
    out.push('\n');
    for d in dims {
        out.push_str(d);
        for v in vectors {
            let w = v
                .get(d)
                .ok_or_else(|| Error::KeyMismatch(format!("{} weights miss dimension {d}", v.scheme)))?;
            let pct = 100.0 * w;
            match decimals {
                Some(k) => out.push_str(&format!(",{pct:.k$}")),
                None => out.push_str(&format!(",{pct}")),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Reads a table written by [`weights_table_csv`] back into normalized
/// weight vectors.
pub fn parse_weights_table(text: &str) -> Result<Vec<WeightVector>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "dimension" {
        return Err(Error::Parse {
            context: "weight table".into(),
            line: 1,
            message: "expected header `dimension,<scheme>...`".into(),
        });
    }
    let schemes = headers
        .iter()
        .skip(1)
        .map(|h| h.parse::<Scheme>())
        .collect::<Result<Vec<_>>>()?;
    let mut columns: Vec<Vec<(String, f64)>> = vec![Vec::new(); schemes.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != headers.len() {
            return Err(Error::Parse {
                context: "weight table".into(),
                line: i + 2,
                message: format!("expected {} fields, found {}", headers.len(), rec.len()),
            });
        }
        for (k, col) in columns.iter_mut().enumerate() {
            let pct: f64 = rec[k + 1].parse().map_err(|_| Error::Parse {
                context: "weight table".into(),
                line: i + 2,
                message: format!("{:?} is not a number", &rec[k + 1]),
            })?;
            col.push((rec[0].to_string(), pct / 100.0));
        }
    }
    schemes
        .into_iter()
        .zip(columns)
        .map(|(s, col)| normalize(&WeightVector::new(s, col)?))
        .collect()
}
