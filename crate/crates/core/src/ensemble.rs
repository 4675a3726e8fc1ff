//! Running the eleven-algorithm suite and summarizing it: the arc-occurrence
//! consensus table, the robust network of high-consensus arcs, the
//! representative suite member, and bootstrap arc strengths.
//!
//! Each algorithm scores an ordered pair `(u, v)` with 1 when its graph has
//! the directed arc `u -> v`, with 0.5 when it has `v -> u` or an undirected
//! `u - v`, and with 0 otherwise. Totals therefore lie in `[0, 11]`.

use std::collections::{BTreeMap, HashMap};

use log::warn;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::{ArcRecord, ConstraintSet, Dag, EdgeKind, LearnedGraph};
use crate::learners::{learn, AlgorithmId, LearnerConfig, RunManifest};
use crate::seed;

pub const SUITE_SIZE: usize = AlgorithmId::ALL.len();
pub const DEFAULT_THRESHOLD: f64 = 6.0;
pub const DEFAULT_BOOTSTRAP: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry {
    pub algorithm: AlgorithmId,
    pub graph: LearnedGraph,
    pub manifest: RunManifest,
}

/// One learned graph per algorithm, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    nodes: Vec<String>,
    entries: Vec<SuiteEntry>,
}

impl SuiteResult {
    pub fn new(entries: Vec<SuiteEntry>) -> Result<Self> {
        let ids: Vec<AlgorithmId> = entries.iter().map(|e| e.algorithm).collect();
        if ids != AlgorithmId::ALL {
            return Err(Error::InvalidArgument(
                "a suite needs exactly one entry per algorithm, in canonical order".into(),
            ));
        }
        let nodes = graph_nodes(&entries[0].graph).to_vec();
        if entries.iter().any(|e| graph_nodes(&e.graph) != nodes.as_slice()) {
            return Err(Error::NodeSetMismatch);
        }
        Ok(SuiteResult { nodes, entries })
    }

    pub fn entries(&self) -> &[SuiteEntry] {
        &self.entries
    }

    pub fn get(&self, algo: AlgorithmId) -> &SuiteEntry {
        &self.entries[algo.position()]
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }
}

fn graph_nodes(g: &LearnedGraph) -> &[String] {
    match g {
        LearnedGraph::Dag(d) => d.nodes(),
        LearnedGraph::Pdag(p) => p.nodes(),
    }
}

/// Learner settings for the suite: a base configuration plus optional
/// per-algorithm replacements. Unless overridden, each algorithm's seed is
/// derived from the base seed and its identifier.
#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    pub base: LearnerConfig,
    pub overrides: BTreeMap<AlgorithmId, LearnerConfig>,
}

impl SuiteConfig {
    pub fn new(base: LearnerConfig) -> Self {
        SuiteConfig {
            base,
            overrides: BTreeMap::new(),
        }
    }

    pub fn for_algorithm(&self, algo: AlgorithmId) -> LearnerConfig {
        self.overrides.get(&algo).cloned().unwrap_or_else(|| LearnerConfig {
            seed: seed::derive(self.base.seed, algo.as_str()),
            ..self.base.clone()
        })
    }
}

/// Runs all eleven learners (concurrently) and collects them in canonical
/// order.
pub fn run_suite(data: &Dataset, c: &ConstraintSet, cfg: &SuiteConfig) -> Result<SuiteResult> {
    let entries = AlgorithmId::ALL
        .par_iter()
        .map(|&algo| {
            let algo_cfg = cfg.for_algorithm(algo);
            let graph = learn(algo, data, c, &algo_cfg)?;
            let manifest = RunManifest::new(algo, &algo_cfg, &graph, data).map_err(|e| Error::Learner {
                algorithm: algo.to_string(),
                source: Box::new(e),
            })?;
            Ok(SuiteEntry {
                algorithm: algo,
                graph,
                manifest,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SuiteResult::new(entries)
}

/// Occurrence score of `from -> to` in one learned graph.
pub fn occurrence(g: &LearnedGraph, from: usize, to: usize) -> f64 {
    match g.edge_kind(from, to) {
        EdgeKind::Forward => 1.0,
        EdgeKind::Backward | EdgeKind::Undirected => 0.5,
        EdgeKind::Absent => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcRow {
    pub from: String,
    pub to: String,
    /// Per-algorithm scores in canonical order.
    pub scores: [f64; SUITE_SIZE],
}

impl ArcRow {
    pub fn total(&self) -> f64 {
        self.scores.iter().sum()
    }
}

/// Consensus table: one row per ordered pair with a positive total, sorted
/// by total (descending) then by names.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcOccurrenceTable {
    nodes: Vec<String>,
    rows: Vec<ArcRow>,
}

fn sort_rows(rows: &mut [ArcRow]) {
    rows.sort_by(|a, b| {
        b.total()
            .total_cmp(&a.total())
            .then_with(|| a.from.cmp(&b.from))
            .then_with(|| a.to.cmp(&b.to))
    });
}

impl ArcOccurrenceTable {
    /// Builds a table from given rows (for example published entries).
    /// Every score must be 0, 0.5 or 1 and each ordered pair may appear once.
    pub fn from_rows(mut rows: Vec<ArcRow>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for r in &rows {
            if r.from == r.to {
                return Err(Error::InvalidArgument(format!("row {} -> {} is a self-loop", r.from, r.to)));
            }
            if !seen.insert((r.from.clone(), r.to.clone())) {
                return Err(Error::InvalidArgument(format!("duplicate row {} -> {}", r.from, r.to)));
            }
            if let Some(x) = r.scores.iter().find(|&&x| x != 0.0 && x != 0.5 && x != 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "row {} -> {}: score {x} is not 0, 0.5 or 1",
                    r.from, r.to
                )));
            }
        }
        let mut nodes: Vec<String> = rows
            .iter()
            .flat_map(|r| [r.from.clone(), r.to.clone()])
            .collect();
        nodes.sort();
        nodes.dedup();
        rows.retain(|r| r.total() > 0.0);
        sort_rows(&mut rows);
        Ok(ArcOccurrenceTable { nodes, rows })
    }

    pub fn rows(&self) -> &[ArcRow] {
        &self.rows
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    /// Total for `from -> to`; 0 when the pair has no row.
    pub fn total(&self, from: &str, to: &str) -> f64 {
        self.rows
            .iter()
            .find(|r| r.from == from && r.to == to)
            .map_or(0.0, ArcRow::total)
    }

    /// CSV with one column per algorithm and a `TOT` column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("from,to");
        for a in AlgorithmId::ALL {
            out.push(',');
            out.push_str(a.as_str());
        }
        out.push_str(",TOT\n");
        for r in &self.rows {
            out.push_str(&format!("{},{}", r.from, r.to));
            for s in r.scores {
                out.push_str(&format!(",{s}"));
            }
            out.push_str(&format!(",{}\n", r.total()));
        }
        out
    }
}

pub fn consensus_table(sr: &SuiteResult) -> ArcOccurrenceTable {
    let n = sr.nodes.len();
    let mut rows = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let mut scores = [0.0; SUITE_SIZE];
            for (slot, e) in scores.iter_mut().zip(&sr.entries) {
                *slot = occurrence(&e.graph, u, v);
            }
            let row = ArcRow {
                from: sr.nodes[u].clone(),
                to: sr.nodes[v].clone(),
                scores,
            };
            if row.total() > 0.0 {
                rows.push(row);
            }
        }
    }
    sort_rows(&mut rows);
    ArcOccurrenceTable {
        nodes: sr.nodes.clone(),
        rows,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustArc {
    pub from: String,
    pub to: String,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustNetwork {
    pub dag: Dag,
    pub threshold: f64,
    /// Arcs of `dag` with their consensus totals, highest first.
    pub arcs: Vec<RobustArc>,
    /// Oriented arcs at or above the threshold before cycle-breaking.
    pub candidates: Vec<RobustArc>,
    /// Candidates left out because they would close a cycle.
    pub dropped: Vec<RobustArc>,
    /// Pairs whose two directions tied; the lexicographically smaller
    /// orientation was kept.
    pub ambiguous: Vec<(String, String)>,
}

impl RobustNetwork {
    pub fn total(&self, from: &str, to: &str) -> Option<f64> {
        self.arcs
            .iter()
            .find(|a| a.from == from && a.to == to)
            .map(|a| a.total)
    }
}

/// Arcs whose total reaches `threshold`. Each pair keeps its better
/// supported direction. Candidates are inserted from the highest total
/// down; one that would close a cycle is the lowest-total arc on it and is
/// dropped.
pub fn robust_network(t: &ArcOccurrenceTable, threshold: f64) -> Result<RobustNetwork> {
    if !(threshold > 0.0 && threshold <= SUITE_SIZE as f64) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, {SUITE_SIZE}], got {threshold}"
        )));
    }
    let qualifying: Vec<&ArcRow> = t.rows.iter().filter(|r| r.total() >= threshold).collect();
    let mut by_pair: HashMap<(String, String), Vec<&ArcRow>> = HashMap::new();
    for r in &qualifying {
        let key = if r.from <= r.to {
            (r.from.clone(), r.to.clone())
        } else {
            (r.to.clone(), r.from.clone())
        };
        by_pair.entry(key).or_default().push(r);
    }

    let mut candidates = Vec::new();
    let mut ambiguous = Vec::new();
    for r in &qualifying {
        let key = if r.from <= r.to {
            (r.from.clone(), r.to.clone())
        } else {
            (r.to.clone(), r.from.clone())
        };
        let group = &by_pair[&key];
        let winner = if group.len() == 1 {
            group[0]
        } else {
            let (a, b) = (group[0], group[1]);
            if a.total() == b.total() {
                if !ambiguous.contains(&key) {
                    warn!(
                        "{} and {} tie at {} in both directions; keeping {} -> {}",
                        key.0,
                        key.1,
                        a.total(),
                        key.0,
                        key.1
                    );
                    ambiguous.push(key.clone());
                }
                if a.from == key.0 {
                    a
                } else {
                    b
                }
            } else if a.total() > b.total() {
                a
            } else {
                b
            }
        };
        if std::ptr::eq(winner, *r) {
            candidates.push(RobustArc {
                from: r.from.clone(),
                to: r.to.clone(),
                total: r.total(),
            });
        }
    }

    let mut dag = Dag::new(t.nodes.clone());
    let mut arcs = Vec::new();
    let mut dropped = Vec::new();
    for a in &candidates {
        let (u, v) = (dag.require(&a.from)?, dag.require(&a.to)?);
        if dag.add_arc(u, v).is_ok() {
            arcs.push(a.clone());
        } else {
            warn!("dropping {} -> {} (total {}): it closes a cycle", a.from, a.to, a.total);
            dropped.push(a.clone());
        }
    }
    Ok(RobustNetwork {
        dag,
        threshold,
        arcs,
        candidates,
        dropped,
        ambiguous,
    })
}

/// Suite DAG containing the most robust arcs; ties go to the higher BIC,
/// then to canonical algorithm order.
pub fn select_representative(sr: &SuiteResult, rn: &RobustNetwork) -> Result<(AlgorithmId, Dag)> {
    let mut best: Option<(&SuiteEntry, usize, f64)> = None;
    for e in &sr.entries {
        let Some(dag) = e.graph.as_dag() else { continue };
        let count = rn
            .arcs
            .iter()
            .filter(|a| match (dag.require(&a.from), dag.require(&a.to)) {
                (Ok(u), Ok(v)) => dag.has_arc(u, v),
                _ => false,
            })
            .count();
        let bic = e.manifest.bic.unwrap_or(f64::NEG_INFINITY);
        let better = match best {
            None => true,
            Some((_, c, b)) => count > c || (count == c && bic > b),
        };
        if better {
            best = Some((e, count, bic));
        }
    }
    let (e, _, _) = best.ok_or_else(|| Error::InvalidArgument("the suite holds no DAG".into()))?;
    Ok((e.algorithm, e.graph.as_dag().expect("checked above").clone()))
}

/// Bootstrap arc strengths for every ordered pair of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthMap {
    nodes: Vec<String>,
    strengths: BTreeMap<(String, String), f64>,
    pub replicates: usize,
    pub failures: usize,
    pub algorithm: Option<AlgorithmId>,
    pub seed: Option<u64>,
}

impl StrengthMap {
    /// A map from explicit values (for example read back from an arc list).
    pub fn from_records(nodes: Vec<String>, records: &[ArcRecord]) -> Result<Self> {
        let mut strengths = BTreeMap::new();
        for r in records {
            let s = r.strength.ok_or_else(|| Error::MissingStrength {
                from: r.from.clone(),
                to: r.to.clone(),
            })?;
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::InvalidArgument(format!(
                    "strength of {} -> {} is {s}, outside [0, 1]",
                    r.from, r.to
                )));
            }
            for name in [&r.from, &r.to] {
                if !nodes.contains(name) {
                    return Err(Error::UnknownVariable(name.clone()));
                }
            }
            strengths.insert((r.from.clone(), r.to.clone()), s);
        }
        Ok(StrengthMap {
            nodes,
            strengths,
            replicates: 0,
            failures: 0,
            algorithm: None,
            seed: None,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    /// Strength of `from -> to`. Bootstrap maps cover every ordered pair;
    /// maps built from records only know the listed arcs.
    pub fn get(&self, from: &str, to: &str) -> Option<f64> {
        self.strengths.get(&(from.to_string(), to.to_string())).copied()
    }

    /// Nonzero entries, by name.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.strengths
            .iter()
            .filter(|(_, &s)| s > 0.0)
            .map(|((a, b), &s)| (a.as_str(), b.as_str(), s))
    }

    /// Arc-list records for the arcs of `dag`.
    pub fn records_for(&self, dag: &Dag) -> Vec<ArcRecord> {
        dag.named_arcs()
            .into_iter()
            .map(|(from, to)| {
                let strength = self.get(&from, &to);
                ArcRecord { from, to, strength }
            })
            .collect()
    }

    /// Nonzero entries as arc-list records.
    pub fn records(&self) -> Vec<ArcRecord> {
        self.iter()
            .map(|(a, b, s)| ArcRecord {
                from: a.to_string(),
                to: b.to_string(),
                strength: Some(s),
            })
            .collect()
    }

    /// DOT rendering of `dag` labelled with strengths.
    pub fn to_dot(&self, dag: &Dag) -> String {
        dag.to_dot_labeled(|u, v| self.get(dag.name(u), dag.name(v)).map(|s| format!("{s:.3}")))
    }
}

pub fn arc_strengths(
    data: &Dataset,
    algo: AlgorithmId,
    b: usize,
    c: &ConstraintSet,
    seed: u64,
) -> Result<StrengthMap> {
    arc_strengths_with(data, algo, b, c, seed, &LearnerConfig::default())
}

/// Strength of `u -> v` is the fraction of bootstrap replicates whose
/// learned graph has the directed arc plus half the fraction where it is
/// undirected. Replicate `i` resamples with seed `derive(seed, "replicate-i")`.
/// Failed replicates are counted and excluded.
pub fn arc_strengths_with(
    data: &Dataset,
    algo: AlgorithmId,
    b: usize,
    c: &ConstraintSet,
    seed: u64,
    cfg: &LearnerConfig,
) -> Result<StrengthMap> {
    if b == 0 {
        return Err(Error::InvalidArgument("bootstrap count must be at least 1".into()));
    }
    let outcomes: Vec<Result<LearnedGraph>> = (0..b)
        .into_par_iter()
        .map(|i| {
            let sample = data.bootstrap_resample(seed::derive(seed, &format!("replicate-{i}")));
            let replicate_cfg = LearnerConfig {
                seed: seed::derive(seed, &format!("learner-{i}")),
                ..cfg.clone()
            };
            learn(algo, &sample, c, &replicate_cfg)
        })
        .collect();

    let names = data.schema().names();
    let n = names.len();
    let mut sums = vec![0.0f64; n * n];
    let mut ok = 0usize;
    let mut failures = 0usize;
    let mut last_error = None;
    for outcome in outcomes {
        match outcome {
            Ok(g) => {
                ok += 1;
                for u in 0..n {
                    for v in 0..n {
                        match g.edge_kind(u, v) {
                            EdgeKind::Forward => sums[u * n + v] += 1.0,
                            EdgeKind::Undirected => sums[u * n + v] += 0.5,
                            _ => {}
                        }
                    }
                }
            }
            Err(e) => {
                failures += 1;
                last_error = Some(e);
            }
        }
    }
    if ok == 0 {
        return Err(last_error.expect("b >= 1"));
    }
    if failures > 0 {
        warn!("{failures} of {b} bootstrap replicates failed and were skipped");
    }
    let mut strengths = BTreeMap::new();
    for u in 0..n {
        for v in 0..n {
            if u != v {
                strengths.insert((names[u].clone(), names[v].clone()), sums[u * n + v] / ok as f64);
            }
        }
    }
    Ok(StrengthMap {
        nodes: names,
        strengths,
        replicates: b,
        failures,
        algorithm: Some(algo),
        seed: Some(seed),
    })
}
