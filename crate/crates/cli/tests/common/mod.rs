#![allow(dead_code)]

use bnweights::dataset::{Role, Schema, VariableSpec};
use bnweights::graph::Dag;
use bnweights::parameters::DiscreteBn;

pub const NODES: [&str; 8] = ["region", "HEALTH", "M_MD", "EDU", "SA_LIFE", "SOC", "POL", "NATURE"];
pub const TARGET: &str = "SA_LIFE";
pub const DIMS: [&str; 6] = ["HEALTH", "M_MD", "EDU", "SOC", "POL", "NATURE"];
pub const ARCS: [(&str, &str); 10] = [
    ("region", "HEALTH"),
    ("region", "M_MD"),
    ("HEALTH", "SA_LIFE"),
    ("M_MD", "SA_LIFE"),
    ("SA_LIFE", "SOC"),
    ("SA_LIFE", "POL"),
    ("SA_LIFE", "NATURE"),
    ("region", "SOC"),
    ("region", "POL"),
    ("region", "NATURE"),
];
pub const GROUPS: [&str; 5] = ["g1", "g2", "g3", "g4", "g5"];
/// The group that leads HEALTH and M_MD but trails SOC, POL and NATURE.
pub const LEADER: &str = "g1";

/// Per-group success probability of HEALTH and M_MD.
const P_PARENT: [f64; 5] = [0.85, 0.6, 0.55, 0.45, 0.35];
/// Per-group mean achievement of SOC, POL and NATURE.
const CHILD_MEAN: [f64; 5] = [0.37, 0.75, 0.6, 0.45, 0.33];
/// Probability that a child copies SA_LIFE; otherwise it is drawn from a
/// group-specific binomial chosen to hit `CHILD_MEAN`.
const CHILD_COPY: f64 = 0.5;

fn target_p(h: usize, m: usize) -> f64 {
    0.2 + 0.6 * (h + m) as f64 / 4.0
}

fn binom2(p: f64) -> [f64; 3] {
    [(1.0 - p) * (1.0 - p), 2.0 * p * (1.0 - p), p * p]
}

/// Eight-node, ten-arc benchmark with three-level variables. `region` is a
/// control with five groups; EDU is an isolated noise dimension.
pub fn benchmark_bn() -> DiscreteBn {
    let lmh = ["low", "mid", "high"];
    let vars: Vec<VariableSpec> = NODES
        .iter()
        .map(|&n| match n {
            "region" => VariableSpec::new(n, &GROUPS, Role::Control),
            TARGET => VariableSpec::new(n, &lmh, Role::Target),
            _ => VariableSpec::new(n, &lmh, Role::Dimension),
        })
        .collect();
    let schema = Schema::new(vars).unwrap();
    let dag = Dag::from_named(&NODES, &ARCS).unwrap();
    let mut probs = Vec::new();
    for &n in &NODES {
        let mut rows = Vec::new();
        match n {
            "region" => rows.extend([0.2; 5]),
            "HEALTH" | "M_MD" => P_PARENT.iter().for_each(|&p| rows.extend(binom2(p))),
            "EDU" => rows.extend(binom2(0.5)),
            TARGET => {
                // parents HEALTH, M_MD; HEALTH varies slowest
                for h in 0..3 {
                    for m in 0..3 {
                        rows.extend(binom2(target_p(h, m)));
                    }
                }
            }
            _ => {
                // parents region, SA_LIFE; region varies slowest
                for g in 0..5 {
                    let target_mean = 0.2 + 0.6 * P_PARENT[g];
                    let other = (CHILD_MEAN[g] - CHILD_COPY * target_mean) / (1.0 - CHILD_COPY);
                    for t in 0..3 {
                        let mut row = binom2(other).map(|x| (1.0 - CHILD_COPY) * x);
                        row[t] += CHILD_COPY;
                        rows.extend(row);
                    }
                }
            }
        }
        probs.push(rows);
    }
    DiscreteBn::new(schema, dag, probs).unwrap()
}

pub fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
