//! Constraint-based learning from Markov blankets.

use std::collections::HashMap;

use log::warn;

use super::blanket::{blanket, BlanketMethod};
use super::subsets::find_subset;
use super::LearnerConfig;
use crate::citests::{CiTester, TestKind};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::{meek_closure, name_order, ConstraintSet, Pdag, ResolvedConstraints};

pub(crate) struct Skeleton {
    /// Adjacent pairs `(min, max)`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub blankets: Vec<Vec<usize>>,
    sepsets: HashMap<(usize, usize), Vec<usize>>,
}

impl Skeleton {
    /// Separating set of a nonadjacent pair. Pairs dropped because they are
    /// not in each other's blanket are separated by the blanket that
    /// excludes the other endpoint.
    fn sepset(&self, a: usize, b: usize) -> &[usize] {
        let key = (a.min(b), a.max(b));
        if let Some(s) = self.sepsets.get(&key) {
            return s;
        }
        if !self.blankets[a].contains(&b) {
            &self.blankets[a]
        } else {
            &self.blankets[b]
        }
    }
}

fn without(set: &[usize], x: usize) -> Vec<usize> {
    set.iter().copied().filter(|&v| v != x).collect()
}

/// Blankets, the symmetric AND rule, then pruning by subsets of the smaller
/// of the two blankets. Whitelisted pairs are always kept; pairs
/// blacklisted in both directions are never adjacent.
pub(crate) fn skeleton(
    tester: &CiTester,
    method: BlanketMethod,
    rc: &ResolvedConstraints,
    max_condition: Option<usize>,
) -> Skeleton {
    let n = rc.node_count();
    let order = name_order(&tester.data().schema().names());
    let blankets: Vec<Vec<usize>> = (0..n).map(|v| blanket(tester, v, method, rc, &order)).collect();
    let mut edges = Vec::new();
    let mut sepsets = HashMap::new();
    for a in 0..n {
        for b in a + 1..n {
            if rc.pair_forbidden(a, b) {
                continue;
            }
            if rc.pair_whitelisted(a, b) {
                edges.push((a, b));
                continue;
            }
            if !(blankets[a].contains(&b) && blankets[b].contains(&a)) {
                continue;
            }
            let ta = without(&blankets[a], b);
            let tb = without(&blankets[b], a);
            let t = if tb.len() < ta.len() { tb } else { ta };
            match find_subset(&t, max_condition, |s| tester.independent(a, b, s)) {
                Some(s) => {
                    sepsets.insert((a, b), s);
                }
                None => edges.push((a, b)),
            }
        }
    }
    Skeleton {
        edges,
        blankets,
        sepsets,
    }
}

pub(crate) fn learn(data: &Dataset, method: BlanketMethod, rc: &ResolvedConstraints, cfg: &LearnerConfig) -> Pdag {
    let tester = cfg.tester(data);
    let sk = skeleton(&tester, method, rc, cfg.max_condition);
    orient(data.schema().names(), &sk, rc)
}

fn orient(names: Vec<String>, sk: &Skeleton, rc: &ResolvedConstraints) -> Pdag {
    let order = name_order(&names);
    let mut p = Pdag::new(names);
    for &(a, b) in &sk.edges {
        p.add_undirected(a, b).expect("distinct endpoints");
    }

    for &(u, v) in rc.whitelist() {
        if !p.adjacent(u, v) {
            warn!(
                "whitelisted arc {} -> {} was removed by CI tests; forcing it back",
                p.nodes()[u],
                p.nodes()[v]
            );
        }
        p.add_directed(u, v).expect("whitelist is acyclic");
    }

    let undirected: Vec<(usize, usize)> = p.undirected().iter().copied().collect();
    for (a, b) in undirected {
        let target = match (rc.is_blacklisted(a, b), rc.is_blacklisted(b, a)) {
            (true, false) => Some((b, a)),
            (false, true) => Some((a, b)),
            _ => None,
        };
        if let Some((from, to)) = target {
            if p.add_directed(from, to).is_err() {
                warn!(
                    "edge {} - {} can only be oriented into a cycle; dropping it",
                    p.nodes()[a],
                    p.nodes()[b]
                );
                p.remove_edge(a, b);
            }
        }
    }

    for &z in &order {
        let mut adj = p.adjacents(z);
        adj.sort_by_key(|&v| order.iter().position(|&o| o == v));
        for (i, &x) in adj.iter().enumerate() {
            for &y in &adj[i + 1..] {
                if p.adjacent(x, y) || sk.sepset(x, y).contains(&z) {
                    continue;
                }
                for e in [x, y] {
                    if p.has_undirected(e, z) && !rc.is_blacklisted(e, z) && p.can_direct(e, z) {
                        p.add_directed(e, z).expect("checked acyclic");
                    }
                }
            }
        }
    }

    meek_closure(&mut p);
    p
}

/// Learns a PDAG with the given blanket method and the G² test at `alpha`.
pub fn constraint_learn(data: &Dataset, method: BlanketMethod, alpha: f64, c: &ConstraintSet) -> Result<Pdag> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let rc = c.resolve(&data.schema().names())?;
    let cfg = LearnerConfig {
        alpha,
        test: TestKind::G2,
        ..Default::default()
    };
    Ok(learn(data, method, &rc, &cfg))
}
