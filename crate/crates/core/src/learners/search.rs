//! Greedy and tabu search over DAGs with single-arc moves.

use std::collections::VecDeque;

use rand::Rng;

use super::LearnerConfig;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::graph::{name_order, ConstraintSet, Dag, ResolvedConstraints};
use crate::scoring::{ScoreType, Scorer};
use crate::seed;

/// Minimum score gain for a move to count as an improvement. Score-equivalent
/// moves differ from zero only by rounding, far below this.
pub(crate) const IMPROVE_EPS: f64 = 1e-7;
/// Deltas closer than this are ties and resolved by arc order.
const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    Add(usize, usize),
    Delete(usize, usize),
    Reverse(usize, usize),
}

impl Move {
    fn inverse(self) -> Move {
        match self {
            Move::Add(u, v) => Move::Delete(u, v),
            Move::Delete(u, v) => Move::Add(u, v),
            Move::Reverse(u, v) => Move::Reverse(v, u),
        }
    }

    fn apply(self, g: &mut Dag) {
        let res = match self {
            Move::Add(u, v) => g.add_arc(u, v),
            Move::Delete(u, v) => {
                g.remove_arc(u, v);
                Ok(())
            }
            Move::Reverse(u, v) => g.reverse_arc(u, v),
        };
        res.expect("moves are checked for admissibility");
    }
}

struct Space<'a> {
    rc: &'a ResolvedConstraints,
    allowed: Option<&'a [bool]>,
    order: Vec<usize>,
}

impl Space<'_> {
    fn allowed(&self, u: usize, v: usize) -> bool {
        self.allowed.map_or(true, |a| a[u * self.rc.node_count() + v])
    }

    /// Admissible moves, in lexicographic (from, to) name order.
    fn moves(&self, g: &Dag) -> Vec<Move> {
        let mut out = Vec::new();
        for &u in &self.order {
            for &v in &self.order {
                if u == v {
                    continue;
                }
                if g.has_arc(u, v) {
                    if self.rc.is_whitelisted(u, v) {
                        continue;
                    }
                    out.push(Move::Delete(u, v));
                    if !self.rc.is_blacklisted(v, u) && g.can_reverse(u, v) {
                        out.push(Move::Reverse(u, v));
                    }
                } else if !g.has_arc(v, u)
                    && !self.rc.is_blacklisted(u, v)
                    && self.allowed(u, v)
                    && g.can_add(u, v)
                {
                    out.push(Move::Add(u, v));
                }
            }
        }
        out
    }
}

fn parents_vec(g: &Dag, v: usize) -> Vec<usize> {
    g.parents(v).iter().copied().collect()
}

fn family_delta(scorer: &Scorer, g: &Dag, v: usize, add: Option<usize>, drop: Option<usize>) -> f64 {
    let old = parents_vec(g, v);
    let mut new: Vec<usize> = old.iter().copied().filter(|&p| Some(p) != drop).collect();
    if let Some(a) = add {
        new.push(a);
    }
    scorer.local(v, &new) - scorer.local(v, &old)
}

fn delta(scorer: &Scorer, g: &Dag, m: Move) -> f64 {
    match m {
        Move::Add(u, v) => family_delta(scorer, g, v, Some(u), None),
        Move::Delete(u, v) => family_delta(scorer, g, v, None, Some(u)),
        Move::Reverse(u, v) => {
            family_delta(scorer, g, v, None, Some(u)) + family_delta(scorer, g, u, Some(v), None)
        }
    }
}

fn best_move<F>(scorer: &Scorer, g: &Dag, space: &Space, mut admit: F) -> Option<(Move, f64)>
where
    F: FnMut(Move, f64) -> bool,
{
    let mut best: Option<(Move, f64)> = None;
    for m in space.moves(g) {
        let d = delta(scorer, g, m);
        if !admit(m, d) {
            continue;
        }
        if best.map_or(true, |(_, bd)| d > bd + TIE_EPS) {
            best = Some((m, d));
        }
    }
    best
}

fn climb(scorer: &Scorer, mut g: Dag, space: &Space) -> Dag {
    while let Some((m, d)) = best_move(scorer, &g, space, |_, _| true) {
        if d <= IMPROVE_EPS {
            break;
        }
        m.apply(&mut g);
    }
    g
}

fn tabu_walk(scorer: &Scorer, start: Dag, space: &Space, cfg: &LearnerConfig) -> Dag {
    let mut current = start;
    let mut current_score = scorer.global(&current);
    let mut best = current.clone();
    let mut best_score = current_score;
    let mut tabu: VecDeque<Move> = VecDeque::with_capacity(cfg.tabu_length + 1);
    let mut escapes = 0;
    loop {
        let chosen = best_move(scorer, &current, space, |m, d| {
            !tabu.contains(&m) || current_score + d > best_score + IMPROVE_EPS
        });
        let Some((m, d)) = chosen else { break };
        if d <= IMPROVE_EPS {
            if escapes >= cfg.max_iter {
                break;
            }
            escapes += 1;
        }
        m.apply(&mut current);
        current_score = scorer.global(&current);
        tabu.push_back(m.inverse());
        if tabu.len() > cfg.tabu_length {
            tabu.pop_front();
        }
        if current_score > best_score + IMPROVE_EPS {
            best = current.clone();
            best_score = current_score;
        }
    }
    best
}

fn whitelist_graph(names: Vec<String>, rc: &ResolvedConstraints) -> Dag {
    Dag::from_arcs(names, rc.whitelist()).expect("whitelist is acyclic")
}

/// Score search over the dataset's variables. `allowed`, when given, is an
/// n×n mask of pairs that may receive new arcs.
pub(crate) fn search(
    scorer: &Scorer,
    rc: &ResolvedConstraints,
    allowed: Option<&[bool]>,
    cfg: &LearnerConfig,
    tabu: bool,
) -> Dag {
    let names = scorer.data().schema().names();
    let space = Space {
        rc,
        allowed,
        order: name_order(&names),
    };
    let optimize = |g: Dag| {
        if tabu {
            tabu_walk(scorer, g, &space, cfg)
        } else {
            climb(scorer, g, &space)
        }
    };
    let mut best = optimize(whitelist_graph(names, rc));
    if cfg.restarts == 0 {
        return best;
    }
    let mut best_score = scorer.global(&best);
    let mut rng = seed::derived_rng(cfg.seed, "restarts");
    for _ in 0..cfg.restarts {
        let mut g = best.clone();
        for _ in 0..cfg.perturb {
            let moves = space.moves(&g);
            if moves.is_empty() {
                break;
            }
            moves[rng.gen_range(0..moves.len())].apply(&mut g);
        }
        let g = optimize(g);
        let s = scorer.global(&g);
        if s > best_score + IMPROVE_EPS {
            best = g;
            best_score = s;
        }
    }
    best
}

fn run(data: &Dataset, s: ScoreType, c: &ConstraintSet, cfg: &LearnerConfig, tabu: bool) -> Result<Dag> {
    cfg.validate()?;
    let rc = c.resolve(&data.schema().names())?;
    let scorer = Scorer::new(data, s);
    Ok(search(&scorer, &rc, None, cfg, tabu))
}

/// Greedy hill climbing from the whitelist-only graph.
pub fn hill_climb(data: &Dataset, s: ScoreType, c: &ConstraintSet, cfg: &LearnerConfig) -> Result<Dag> {
    run(data, s, c, cfg, false)
}

/// Tabu search; returns the best graph visited.
pub fn tabu_search(data: &Dataset, s: ScoreType, c: &ConstraintSet, cfg: &LearnerConfig) -> Result<Dag> {
    run(data, s, c, cfg, true)
}

/// True when no admissible single-arc move improves the score of `g`.
/// Node names of `g` must match the dataset's variables in schema order.
pub fn is_local_optimum(g: &Dag, data: &Dataset, s: ScoreType, c: &ConstraintSet) -> Result<bool> {
    let names = data.schema().names();
    if g.nodes() != names.as_slice() {
        return Err(crate::error::Error::NodeSetMismatch);
    }
    let rc = c.resolve(&names)?;
    let scorer = Scorer::new(data, s);
    let space = Space {
        rc: &rc,
        allowed: None,
        order: name_order(&names),
    };
    Ok(best_move(&scorer, g, &space, |_, _| true).map_or(true, |(_, d)| d <= IMPROVE_EPS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Role, Schema, VariableSpec};
    use crate::graph::check_constraints;

    fn coupled(n: usize, seed: u64) -> Dataset {
        let schema = Schema::new(vec![
            VariableSpec::new("A", &["0", "1"], Role::Dimension),
            VariableSpec::new("B", &["0", "1"], Role::Dimension),
            VariableSpec::new("C", &["0", "1"], Role::Target),
        ])
        .unwrap();
        let mut rng = seed::rng(seed);
        let rows: Vec<Vec<usize>> = (0..n)
            .map(|_| {
                let a = rng.gen_range(0..2);
                let b = if rng.gen_bool(0.9) { a } else { 1 - a };
                let c = rng.gen_range(0..2);
                vec![a, b, c]
            })
            .collect();
        Dataset::new(schema, &rows).unwrap()
    }

    #[test]
    fn finds_the_single_dependence() {
        let data = coupled(2000, 1);
        let g = hill_climb(&data, ScoreType::Bic, &ConstraintSet::empty(), &LearnerConfig::default()).unwrap();
        assert_eq!(g.arc_count(), 1);
        assert!(g.has_arc(0, 1) || g.has_arc(1, 0));
        assert!(is_local_optimum(&g, &data, ScoreType::Bic, &ConstraintSet::empty()).unwrap());
    }

    #[test]
    fn whitelist_and_blacklist_are_honored() {
        let data = coupled(2000, 2);
        let c = ConstraintSet::new([("A", "B"), ("B", "A")], [("C", "A")]).unwrap();
        for tabu in [false, true] {
            let g = run(&data, ScoreType::Bic, &c, &LearnerConfig::default(), tabu).unwrap();
            assert!(check_constraints(&g, &c));
            assert!(g.has_arc(2, 0));
        }
    }

    #[test]
    fn zero_escape_tabu_equals_hill_climb() {
        let data = coupled(500, 3);
        let cfg = LearnerConfig {
            max_iter: 0,
            ..Default::default()
        };
        let c = ConstraintSet::empty();
        let hc = hill_climb(&data, ScoreType::Aic, &c, &cfg).unwrap();
        let tabu = tabu_search(&data, ScoreType::Aic, &c, &cfg).unwrap();
        assert_eq!(hc, tabu);
    }

    #[test]
    fn restarts_are_seeded() {
        let data = coupled(500, 4);
        let cfg = LearnerConfig {
            restarts: 3,
            perturb: 2,
            seed: 11,
            ..Default::default()
        };
        let c = ConstraintSet::empty();
        let a = hill_climb(&data, ScoreType::K2, &c, &cfg).unwrap();
        let b = hill_climb(&data, ScoreType::K2, &c, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
