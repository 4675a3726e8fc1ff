//! Markov blanket discovery by grow/shrink CI testing.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::citests::{CiTester, TestKind};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::{name_order, ConstraintSet, ResolvedConstraints};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlanketMethod {
    Gs,
    Iamb,
    FastIamb,
    InterIamb,
}

impl fmt::Display for BlanketMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlanketMethod::Gs => "gs",
            BlanketMethod::Iamb => "iamb",
            BlanketMethod::FastIamb => "fast-iamb",
            BlanketMethod::InterIamb => "inter-iamb",
        })
    }
}

impl FromStr for BlanketMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gs" => Ok(BlanketMethod::Gs),
            "iamb" => Ok(BlanketMethod::Iamb),
            "fast-iamb" => Ok(BlanketMethod::FastIamb),
            "inter-iamb" => Ok(BlanketMethod::InterIamb),
            other => Err(Error::InvalidArgument(format!("unknown blanket method {other:?}"))),
        }
    }
}

/// Markov blanket of `v` using the G² test at level `alpha`. Variables
/// whitelisted to or from `v` are always included. Returned names are sorted.
pub fn markov_blanket(
    data: &Dataset,
    v: &str,
    method: BlanketMethod,
    alpha: f64,
    c: &ConstraintSet,
) -> Result<Vec<String>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let schema = data.schema();
    let vi = schema.require(v)?;
    let rc = c.resolve(&schema.names())?;
    let tester = CiTester::new(data, TestKind::G2, alpha);
    let mb = blanket(&tester, vi, method, &rc, &name_order(&schema.names()));
    let mut names: Vec<String> = mb.iter().map(|&i| schema.variable(i).name.clone()).collect();
    names.sort();
    Ok(names)
}

/// Association strength of a candidate: smaller p first, larger statistic
/// breaks p-value ties (p underflows to 0 for strong dependence).
#[derive(Clone, Copy)]
struct Assoc {
    p: f64,
    stat: f64,
}

impl Assoc {
    fn stronger(&self, other: &Assoc) -> bool {
        match self.p.partial_cmp(&other.p).unwrap_or(Ordering::Equal) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.stat > other.stat,
        }
    }
}

struct Ctx<'a, 'b> {
    tester: &'b CiTester<'a>,
    v: usize,
    forced: Vec<usize>,
    order: &'b [usize],
}

impl Ctx<'_, '_> {
    fn assoc(&self, y: usize, mb: &[usize]) -> Assoc {
        let r = self.tester.test(self.v, y, mb);
        Assoc {
            p: r.p_value,
            stat: r.statistic - r.dof as f64,
        }
    }

    fn candidates<'m>(&'m self, mb: &'m [usize]) -> impl Iterator<Item = usize> + 'm {
        self.order
            .iter()
            .copied()
            .filter(move |&y| y != self.v && !mb.contains(&y))
    }

    /// Candidate with the strongest association given `mb`.
    fn strongest(&self, mb: &[usize]) -> Option<(usize, Assoc)> {
        let mut best: Option<(usize, Assoc)> = None;
        for y in self.candidates(mb) {
            let a = self.assoc(y, mb);
            if best.map_or(true, |(_, b)| a.stronger(&b)) {
                best = Some((y, a));
            }
        }
        best
    }

    /// Removes, in name order, members independent of v given the rest.
    fn shrink(&self, mb: &mut Vec<usize>) -> bool {
        let mut changed = false;
        for &y in self.order {
            if !mb.contains(&y) || self.forced.contains(&y) {
                continue;
            }
            let rest: Vec<usize> = mb.iter().copied().filter(|&z| z != y).collect();
            if self.tester.independent(self.v, y, &rest) {
                mb.retain(|&z| z != y);
                changed = true;
            }
        }
        changed
    }

    fn grow_shrink(&self, mut mb: Vec<usize>) -> Vec<usize> {
        loop {
            let mut added = false;
            for y in self.order.iter().copied() {
                if y == self.v || mb.contains(&y) {
                    continue;
                }
                if !self.tester.independent(self.v, y, &mb) {
                    mb.push(y);
                    added = true;
                }
            }
            if !added {
                break;
            }
        }
        self.shrink(&mut mb);
        mb
    }

    fn iamb(&self, mut mb: Vec<usize>) -> Vec<usize> {
        while let Some((y, a)) = self.strongest(&mb) {
            if a.p >= self.tester.alpha() {
                break;
            }
            mb.push(y);
        }
        self.shrink(&mut mb);
        mb
    }

    fn fast_iamb(&self, mut mb: Vec<usize>) -> Vec<usize> {
        let mut seen = HashSet::new();
        loop {
            let mut significant: Vec<(usize, Assoc)> = self
                .candidates(&mb)
                .map(|y| (y, self.assoc(y, &mb)))
                .filter(|(_, a)| a.p < self.tester.alpha())
                .collect();
            if significant.is_empty() {
                break;
            }
            // stable sort keeps name order among equally strong candidates
            significant.sort_by(|a, b| {
                if a.1.stronger(&b.1) {
                    Ordering::Less
                } else if b.1.stronger(&a.1) {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            });
            mb.extend(significant.iter().map(|&(y, _)| y));
            self.shrink(&mut mb);
            if !seen.insert(sorted(&mb)) {
                break;
            }
        }
        mb
    }

    fn inter_iamb(&self, mut mb: Vec<usize>) -> Vec<usize> {
        let mut seen = HashSet::new();
        loop {
            let mut added = false;
            if let Some((y, a)) = self.strongest(&mb) {
                if a.p < self.tester.alpha() {
                    mb.push(y);
                    added = true;
                }
            }
            self.shrink(&mut mb);
            if !added || !seen.insert(sorted(&mb)) {
                break;
            }
        }
        mb
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// Blanket of `v` as sorted schema indices. `order` is the name order of
/// the variables.
pub(crate) fn blanket(
    tester: &CiTester,
    v: usize,
    method: BlanketMethod,
    rc: &ResolvedConstraints,
    order: &[usize],
) -> Vec<usize> {
    let forced: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&y| y != v && rc.pair_whitelisted(v, y))
        .collect();
    let ctx = Ctx {
        tester,
        v,
        forced: forced.clone(),
        order,
    };
    let mb = match method {
        BlanketMethod::Gs => ctx.grow_shrink(forced),
        BlanketMethod::Iamb => ctx.iamb(forced),
        BlanketMethod::FastIamb => ctx.fast_iamb(forced),
        BlanketMethod::InterIamb => ctx.inter_iamb(forced),
    };
    sorted(&mb)
}
