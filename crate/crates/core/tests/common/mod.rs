#![allow(dead_code)]

use bnweights::dataset::{Dataset, Role, Schema, VariableSpec};
use bnweights::graph::Dag;
use bnweights::parameters::{forward_sample, DiscreteBn};

/// Binary network whose last node is the target. Root nodes are uniform;
/// a node with parents is 1 with probability `0.1 + 0.8 * mean(parents)`,
/// a monotone and hence faithful dependence.
pub fn binary_bn(names: &[&str], arcs: &[(&str, &str)]) -> DiscreteBn {
    let vars: Vec<VariableSpec> = names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let role = if i + 1 == names.len() { Role::Target } else { Role::Dimension };
            VariableSpec::new(*n, &["0", "1"], role)
        })
        .collect();
    let schema = Schema::new(vars).unwrap();
    let dag = Dag::from_named(names, arcs).unwrap();
    let probs = (0..names.len())
        .map(|v| {
            let k = dag.parents(v).len();
            let q = 1usize << k;
            let mut rows = Vec::with_capacity(q * 2);
            for config in 0..q {
                let p1 = if k == 0 {
                    0.5
                } else {
                    0.1 + 0.8 * config.count_ones() as f64 / k as f64
                };
                rows.extend([1.0 - p1, p1]);
            }
            rows
        })
        .collect();
    DiscreteBn::new(schema, dag, probs).unwrap()
}

pub fn sample(names: &[&str], arcs: &[(&str, &str)], n: usize, seed: u64) -> Dataset {
    forward_sample(&binary_bn(names, arcs), n, seed).unwrap()
}

pub const EIGHT: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];
pub const EIGHT_ARCS: [(&str, &str); 8] = [
    ("A", "C"),
    ("B", "C"),
    ("C", "D"),
    ("D", "F"),
    ("E", "F"),
    ("F", "H"),
    ("B", "G"),
    ("G", "H"),
];

/// Dataset from explicit rows; every variable has `cards[i]` categories
/// labelled 0.., and the last variable is the target.
pub fn table(names: &[&str], cards: &[usize], rows: &[Vec<usize>]) -> Dataset {
    let labels: Vec<Vec<String>> = cards.iter().map(|&k| (0..k).map(|i| i.to_string()).collect()).collect();
    let vars = names
        .iter()
        .zip(&labels)
        .enumerate()
        .map(|(i, (n, l))| {
            let refs: Vec<&str> = l.iter().map(String::as_str).collect();
            let role = if i + 1 == names.len() { Role::Target } else { Role::Dimension };
            VariableSpec::new(*n, &refs, role)
        })
        .collect();
    Dataset::new(Schema::new(vars).unwrap(), rows).unwrap()
}

pub fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
