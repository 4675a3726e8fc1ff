//! Max-min parents and children.

use super::subsets::find_subset;
use crate::citests::{CiTester, TestKind};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::{name_order, ConstraintSet, ResolvedConstraints};

/// Weakest association of `y` with `t` over subsets of `cpc`, as the
/// largest p-value seen (with its statistic for tie-breaks). Stops at the
/// first subset that separates.
fn min_assoc(tester: &CiTester, t: usize, y: usize, cpc: &[usize], max_condition: Option<usize>) -> (f64, f64) {
    let mut worst = (f64::NEG_INFINITY, f64::INFINITY);
    find_subset(cpc, max_condition, |s| {
        let r = tester.test(t, y, s);
        let stat = r.statistic - r.dof as f64;
        if r.p_value > worst.0 || (r.p_value == worst.0 && stat < worst.1) {
            worst = (r.p_value, stat);
        }
        r.p_value >= tester.alpha()
    });
    worst
}

fn parents_children(
    tester: &CiTester,
    t: usize,
    rc: &ResolvedConstraints,
    order: &[usize],
    max_condition: Option<usize>,
) -> Vec<usize> {
    let forced: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&y| y != t && rc.pair_whitelisted(t, y))
        .collect();
    let mut cpc = forced.clone();
    let mut remaining: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&y| y != t && !cpc.contains(&y) && !rc.pair_forbidden(t, y))
        .collect();

    loop {
        let mut best: Option<(usize, (f64, f64))> = None;
        let mut kept = Vec::with_capacity(remaining.len());
        for &y in &remaining {
            let a = min_assoc(tester, t, y, &cpc, max_condition);
            if a.0 >= tester.alpha() {
                continue;
            }
            kept.push(y);
            let better = best.map_or(true, |(_, b)| a.0 < b.0 || (a.0 == b.0 && a.1 > b.1));
            if better {
                best = Some((y, a));
            }
        }
        remaining = kept;
        let Some((y, _)) = best else { break };
        cpc.push(y);
        remaining.retain(|&z| z != y);
    }

    for &y in order {
        if !cpc.contains(&y) || forced.contains(&y) {
            continue;
        }
        let rest: Vec<usize> = cpc.iter().copied().filter(|&z| z != y).collect();
        if find_subset(&rest, max_condition, |s| tester.independent(t, y, s)).is_some() {
            cpc.retain(|&z| z != y);
        }
    }
    cpc
}

/// Skeleton pairs `(min, max)`, kept only when each endpoint is in the
/// other's parent-children set (whitelisted pairs always kept).
pub(crate) fn mmpc(tester: &CiTester, rc: &ResolvedConstraints, max_condition: Option<usize>) -> Vec<(usize, usize)> {
    let n = rc.node_count();
    let order = name_order(&tester.data().schema().names());
    let pcs: Vec<Vec<usize>> = (0..n)
        .map(|t| parents_children(tester, t, rc, &order, max_condition))
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rc.pair_whitelisted(a, b) || (pcs[a].contains(&b) && pcs[b].contains(&a)) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Undirected skeleton from max-min parent-children discovery with the G²
/// test at `alpha`. Each pair is name-sorted; the list is sorted.
pub fn mmpc_skeleton(data: &Dataset, alpha: f64, c: &ConstraintSet) -> Result<Vec<(String, String)>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let names = data.schema().names();
    let rc = c.resolve(&names)?;
    let tester = CiTester::new(data, TestKind::G2, alpha);
    let mut out: Vec<(String, String)> = mmpc(&tester, &rc, None)
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (names[a].clone(), names[b].clone());
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    out.sort();
    Ok(out)
}
