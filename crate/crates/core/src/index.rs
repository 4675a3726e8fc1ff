//! Composite index, group rankings and rank-shift comparison.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use log::warn;

use crate::dataset::ScoreMatrix;
use crate::error::{Error, Result};
use crate::weights::{Scheme, WeightVector};

/// Per-unit composite index under one weighting scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeIndex {
    pub scheme: Scheme,
    values: Vec<f64>,
}

impl CompositeIndex {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Weighted arithmetic mean of each unit's achievement scores.
pub fn composite_index(scores: &ScoreMatrix, w: &WeightVector) -> Result<CompositeIndex> {
    if !w.is_normalized() {
        return Err(Error::InvalidArgument(format!("{} weights are not normalized", w.scheme)));
    }
    let mut wanted: Vec<&str> = w.names();
    let mut have: Vec<&str> = scores.dims.iter().map(String::as_str).collect();
    wanted.sort_unstable();
    have.sort_unstable();
    if wanted != have {
        return Err(Error::KeyMismatch(format!(
            "weights [{}] vs scores [{}]",
            wanted.join(", "),
            have.join(", ")
        )));
    }
    let coef: Vec<f64> = scores
        .dims
        .iter()
        .map(|d| w.get(d).expect("key sets checked"))
        .collect();
    let values = (0..scores.n)
        .map(|u| {
            let v: f64 = scores.row(u).iter().zip(&coef).map(|(s, c)| s * c).sum();
            v.clamp(0.0, 1.0)
        })
        .collect();
    Ok(CompositeIndex {
        scheme: w.scheme,
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupRank {
    pub group: String,
    pub mean: f64,
    pub units: usize,
    pub rank: usize,
}

/// Groups of one scheme ordered by rank, 1 = highest mean.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub scheme: Scheme,
    rows: Vec<GroupRank>,
}

impl RankTable {
    pub fn rows(&self) -> &[GroupRank] {
        &self.rows
    }

    pub fn rank(&self, group: &str) -> Option<usize> {
        self.rows.iter().find(|r| r.group == group).map(|r| r.rank)
    }

    pub fn mean(&self, group: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.group == group).map(|r| r.mean)
    }

    fn groups(&self) -> Vec<&str> {
        let mut g: Vec<&str> = self.rows.iter().map(|r| r.group.as_str()).collect();
        g.sort_unstable();
        g
    }
}

/// Ranks groups by their unweighted mean index. Equal means are ordered by
/// group label.
pub fn group_rankings<S: AsRef<str>>(idx: &CompositeIndex, groups: &[S]) -> Result<RankTable> {
    if groups.len() != idx.len() {
        return Err(Error::InvalidArgument(format!(
            "{} group labels for {} units",
            groups.len(),
            idx.len()
        )));
    }
    let mut acc: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for (g, v) in groups.iter().zip(idx.values()) {
        let e = acc.entry(g.as_ref()).or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }
    if acc.is_empty() {
        return Err(Error::InvalidArgument("no groups to rank".into()));
    }
    let mut rows: Vec<GroupRank> = acc
        .into_iter()
        .map(|(g, (sum, n))| GroupRank {
            group: g.to_string(),
            mean: sum / n as f64,
            units: n,
            rank: 0,
        })
        .collect();
    rows.sort_by(|a, b| b.mean.total_cmp(&a.mean).then_with(|| a.group.cmp(&b.group)));
    for i in 0..rows.len() {
        rows[i].rank = i + 1;
        if i > 0 && rows[i].mean == rows[i - 1].mean {
            warn!(
                "{}: groups {} and {} tie on mean {}; ordered by label",
                idx.scheme, rows[i - 1].group, rows[i].group, rows[i].mean
            );
        }
    }
    Ok(RankTable {
        scheme: idx.scheme,
        rows,
    })
}

pub const DEFAULT_BASELINE: Scheme = Scheme::Equal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftRow {
    pub group: String,
    /// Rank under each scheme, in report order.
    pub ranks: Vec<usize>,
    pub max_shift: usize,
}

/// Per-group ranks across schemes, sorted by descending shift against the
/// baseline, then by group label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftReport {
    pub baseline: Scheme,
    pub schemes: Vec<Scheme>,
    pub rows: Vec<ShiftRow>,
}

impl ShiftReport {
    pub fn row(&self, group: &str) -> Option<&ShiftRow> {
        self.rows.iter().find(|r| r.group == group)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("group");
        for s in &self.schemes {
            let _ = write!(out, ",{}", s.label());
        }
        out.push_str(",max_shift\n");
        for r in &self.rows {
            out.push_str(&r.group);
            for k in &r.ranks {
                let _ = write!(out, ",{k}");
            }
            let _ = writeln!(out, ",{}", r.max_shift);
        }
        out
    }
}

pub fn rank_shift_report(tables: &[RankTable], baseline: Scheme) -> Result<ShiftReport> {
    if tables.len() < 2 {
        return Err(Error::InvalidArgument("rank shifts need at least two schemes".into()));
    }
    for (i, t) in tables.iter().enumerate() {
        if tables[..i].iter().any(|u| u.scheme == t.scheme) {
            return Err(Error::InvalidArgument(format!("scheme {} given twice", t.scheme)));
        }
    }
    let base = tables
        .iter()
        .find(|t| t.scheme == baseline)
        .ok_or_else(|| Error::InvalidArgument(format!("baseline scheme {baseline} not among the tables")))?;
    let groups = base.groups();
    for t in tables {
        if t.groups() != groups {
            return Err(Error::GroupMismatch(format!(
                "{} has [{}], {} has [{}]",
                baseline,
                groups.join(", "),
                t.scheme,
                t.groups().join(", ")
            )));
        }
    }
    let mut rows: Vec<ShiftRow> = groups
        .iter()
        .map(|&g| {
            let ranks: Vec<usize> = tables.iter().map(|t| t.rank(g).expect("group sets checked")).collect();
            let b = base.rank(g).expect("group sets checked");
            let max_shift = ranks.iter().map(|&r| r.abs_diff(b)).max().unwrap_or(0);
            ShiftRow {
                group: g.to_string(),
                ranks,
                max_shift,
            }
        })
        .collect();
    rows.sort_by(|a, b| b.max_shift.cmp(&a.max_shift).then_with(|| a.group.cmp(&b.group)));
    Ok(ShiftReport {
        baseline,
        schemes: tables.iter().map(|t| t.scheme).collect(),
        rows,
    })
}

/// `group,scheme,mean,rank`, groups in label order, schemes in table order.
pub fn rankings_csv(tables: &[RankTable]) -> String {
    let mut groups: Vec<&str> = tables.iter().flat_map(|t| t.groups()).collect();
    groups.sort_unstable();
    groups.dedup();
    let mut out = String::from("group,scheme,mean,rank\n");
    for g in groups {
        for t in tables {
            if let Some(r) = t.rows.iter().find(|r| r.group == g) {
                let _ = writeln!(out, "{g},{},{},{}", t.scheme, r.mean, r.rank);
            }
        }
    }
    out
}

/// Long format for bump charts: one row per (scheme, group) with the
/// scheme's x position.
pub fn bump_chart_csv(tables: &[RankTable]) -> String {
    let mut out = String::from("x,scheme,label,group,rank,mean\n");
    for (x, t) in tables.iter().enumerate() {
        for r in &t.rows {
            let _ = writeln!(out, "{x},{},{},{},{},{}", t.scheme, t.scheme.label(), r.group, r.rank, r.mean);
        }
    }
    out
}
