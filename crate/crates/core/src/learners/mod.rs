//! Structure learners: score-based (hill climbing, tabu search),
//! constraint-based (Grow-Shrink and the IAMB family) and hybrid
//! (restrict-maximize) algorithms, all honoring a [`ConstraintSet`].

mod blanket;
mod constraint;
mod mmpc;
mod search;
mod subsets;

use std::fmt;
use std::str::FromStr;

pub use blanket::{markov_blanket, BlanketMethod};
pub use constraint::constraint_learn;
pub use mmpc::mmpc_skeleton;
pub use search::{hill_climb, is_local_optimum, tabu_search};

use crate::citests::{CiTester, TestKind};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::{ConstraintSet, Dag, LearnedGraph, ResolvedConstraints};
use crate::scoring::{global_score, ScoreType, Scorer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Score,
    Constraint,
    Hybrid,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Score => "score",
            Family::Constraint => "constraint",
            Family::Hybrid => "hybrid",
        })
    }
}

/// The eleven algorithms of the suite, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    HcBic,
    HcAic,
    HcK2,
    TabuBic,
    TabuAic,
    Gs,
    Iamb,
    FastIamb,
    InterIamb,
    MmhcBic,
    Rsmax2,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 11] = [
        AlgorithmId::HcBic,
        AlgorithmId::HcAic,
        AlgorithmId::HcK2,
        AlgorithmId::TabuBic,
        AlgorithmId::TabuAic,
        AlgorithmId::Gs,
        AlgorithmId::Iamb,
        AlgorithmId::FastIamb,
        AlgorithmId::InterIamb,
        AlgorithmId::MmhcBic,
        AlgorithmId::Rsmax2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmId::HcBic => "hc-bic",
            AlgorithmId::HcAic => "hc-aic",
            AlgorithmId::HcK2 => "hc-k2",
            AlgorithmId::TabuBic => "tabu-bic",
            AlgorithmId::TabuAic => "tabu-aic",
            AlgorithmId::Gs => "gs",
            AlgorithmId::Iamb => "iamb",
            AlgorithmId::FastIamb => "fast-iamb",
            AlgorithmId::InterIamb => "inter-iamb",
            AlgorithmId::MmhcBic => "mmhc-bic",
            AlgorithmId::Rsmax2 => "rsmax2",
        }
    }

    pub fn family(self) -> Family {
        match self {
            AlgorithmId::HcBic
            | AlgorithmId::HcAic
            | AlgorithmId::HcK2
            | AlgorithmId::TabuBic
            | AlgorithmId::TabuAic => Family::Score,
            AlgorithmId::Gs | AlgorithmId::Iamb | AlgorithmId::FastIamb | AlgorithmId::InterIamb => {
                Family::Constraint
            }
            AlgorithmId::MmhcBic | AlgorithmId::Rsmax2 => Family::Hybrid,
        }
    }

    /// Score maximized by score-based and hybrid algorithms.
    pub fn score_type(self) -> Option<ScoreType> {
        match self {
            AlgorithmId::HcBic | AlgorithmId::TabuBic | AlgorithmId::MmhcBic | AlgorithmId::Rsmax2 => {
                Some(ScoreType::Bic)
            }
            AlgorithmId::HcAic | AlgorithmId::TabuAic => Some(ScoreType::Aic),
            AlgorithmId::HcK2 => Some(ScoreType::K2),
            _ => None,
        }
    }

    pub fn position(self) -> usize {
        AlgorithmId::ALL
            .iter()
            .position(|&a| a == self)
            .expect("listed in ALL")
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmId::ALL
            .iter()
            .copied()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = AlgorithmId::ALL.iter().map(|a| a.as_str()).collect();
                Error::InvalidArgument(format!(
                    "unknown algorithm {s:?}; valid: {}",
                    valid.join(", ")
                ))
            })
    }
}

/// Search and test settings shared by all learners.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub score: ScoreType,
    pub alpha: f64,
    pub test: TestKind,
    pub tabu_length: usize,
    /// Budget of non-improving tabu moves.
    pub max_iter: usize,
    pub restarts: usize,
    /// Random moves applied before each restart climb.
    pub perturb: usize,
    /// Largest conditioning set searched when looking for separating sets.
    pub max_condition: Option<usize>,
    pub seed: u64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            score: ScoreType::Bic,
            alpha: 0.05,
            test: TestKind::G2,
            tabu_length: 10,
            max_iter: 100,
            restarts: 0,
            perturb: 1,
            max_condition: None,
            seed: 0,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.tabu_length == 0 {
            return Err(Error::InvalidArgument("tabu length must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn tester<'a>(&self, data: &'a Dataset) -> CiTester<'a> {
        CiTester::new(data, self.test, self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restrict {
    Mmpc,
    Iamb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Maximize {
    Hc,
    Tabu,
}

/// Restrict-maximize learning: a skeleton from `restrict`, then a score
/// search that may only add arcs along that skeleton (whitelisted arcs are
/// always present).
pub fn hybrid_learn(
    data: &Dataset,
    restrict: Restrict,
    maximize: Maximize,
    s: ScoreType,
    alpha: f64,
    c: &ConstraintSet,
    cfg: &LearnerConfig,
) -> Result<Dag> {
    let cfg = &LearnerConfig {
        score: s,
        alpha,
        ..cfg.clone()
    };
    cfg.validate()?;
    let rc = c.resolve(&data.schema().names())?;
    Ok(hybrid_resolved(data, restrict, maximize, &rc, cfg))
}

pub(crate) fn restrict_skeleton(
    data: &Dataset,
    restrict: Restrict,
    rc: &ResolvedConstraints,
    cfg: &LearnerConfig,
) -> Vec<(usize, usize)> {
    let tester = cfg.tester(data);
    match restrict {
        Restrict::Mmpc => mmpc::mmpc(&tester, rc, cfg.max_condition),
        Restrict::Iamb => {
            constraint::skeleton(&tester, BlanketMethod::Iamb, rc, cfg.max_condition).edges
        }
    }
}

fn hybrid_resolved(
    data: &Dataset,
    restrict: Restrict,
    maximize: Maximize,
    rc: &ResolvedConstraints,
    cfg: &LearnerConfig,
) -> Dag {
    let skeleton = restrict_skeleton(data, restrict, rc, cfg);
    maximize_within(data, &skeleton, maximize, rc, cfg)
}

fn maximize_within(
    data: &Dataset,
    skeleton: &[(usize, usize)],
    maximize: Maximize,
    rc: &ResolvedConstraints,
    cfg: &LearnerConfig,
) -> Dag {
    let n = data.m();
    let mut allowed = vec![false; n * n];
    for &(a, b) in skeleton {
        allowed[a * n + b] = true;
        allowed[b * n + a] = true;
    }
    let scorer = Scorer::new(data, cfg.score);
    search::search(&scorer, rc, Some(&allowed), cfg, maximize == Maximize::Tabu)
}

/// The maximize phase alone: score search that may only add arcs between
/// the given unordered pairs (whitelisted arcs are always present).
pub fn restricted_search(
    data: &Dataset,
    skeleton: &[(String, String)],
    maximize: Maximize,
    s: ScoreType,
    c: &ConstraintSet,
    cfg: &LearnerConfig,
) -> Result<Dag> {
    let cfg = &LearnerConfig {
        score: s,
        ..cfg.clone()
    };
    cfg.validate()?;
    let schema = data.schema();
    let rc = c.resolve(&schema.names())?;
    let pairs = skeleton
        .iter()
        .map(|(a, b)| Ok((schema.require(a)?, schema.require(b)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(maximize_within(data, &pairs, maximize, &rc, cfg))
}

/// Runs one suite algorithm. The algorithm fixes the score type; every
/// other setting comes from `cfg`.
pub fn learn(algo: AlgorithmId, data: &Dataset, c: &ConstraintSet, cfg: &LearnerConfig) -> Result<LearnedGraph> {
    run(algo, data, c, cfg).map_err(|e| Error::Learner {
        algorithm: algo.to_string(),
        source: Box::new(e),
    })
}

fn run(algo: AlgorithmId, data: &Dataset, c: &ConstraintSet, cfg: &LearnerConfig) -> Result<LearnedGraph> {
    let mut cfg = cfg.clone();
    if let Some(s) = algo.score_type() {
        cfg.score = s;
    }
    cfg.validate()?;
    let rc = c.resolve(&data.schema().names())?;
    let scorer = || Scorer::new(data, cfg.score);
    let graph = match algo {
        AlgorithmId::HcBic | AlgorithmId::HcAic | AlgorithmId::HcK2 => {
            LearnedGraph::Dag(search::search(&scorer(), &rc, None, &cfg, false))
        }
        AlgorithmId::TabuBic | AlgorithmId::TabuAic => {
            LearnedGraph::Dag(search::search(&scorer(), &rc, None, &cfg, true))
        }
        AlgorithmId::Gs => LearnedGraph::Pdag(constraint::learn(data, BlanketMethod::Gs, &rc, &cfg)),
        AlgorithmId::Iamb => LearnedGraph::Pdag(constraint::learn(data, BlanketMethod::Iamb, &rc, &cfg)),
        AlgorithmId::FastIamb => {
            LearnedGraph::Pdag(constraint::learn(data, BlanketMethod::FastIamb, &rc, &cfg))
        }
        AlgorithmId::InterIamb => {
            LearnedGraph::Pdag(constraint::learn(data, BlanketMethod::InterIamb, &rc, &cfg))
        }
        AlgorithmId::MmhcBic => LearnedGraph::Dag(hybrid_resolved(data, Restrict::Mmpc, Maximize::Hc, &rc, &cfg)),
        AlgorithmId::Rsmax2 => LearnedGraph::Dag(hybrid_resolved(data, Restrict::Iamb, Maximize::Tabu, &rc, &cfg)),
    };
    Ok(graph)
}

/// Audit record of one learner run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub algorithm: AlgorithmId,
    pub config: LearnerConfig,
    /// Score of the learned DAG under the algorithm's own score type.
    pub score: Option<f64>,
    /// BIC of the learned DAG; used to break ties between suite members.
    pub bic: Option<f64>,
    pub edges: Vec<String>,
}

impl RunManifest {
    pub fn new(algorithm: AlgorithmId, config: &LearnerConfig, graph: &LearnedGraph, data: &Dataset) -> Result<Self> {
        let (score, bic) = match graph.as_dag() {
            Some(dag) => {
                let own = match algorithm.score_type() {
                    Some(s) => Some(global_score(dag, data, s)?),
                    None => None,
                };
                (own, Some(global_score(dag, data, ScoreType::Bic)?))
            }
            None => (None, None),
        };
        let mut config = config.clone();
        if let Some(s) = algorithm.score_type() {
            config.score = s;
        }
        Ok(RunManifest {
            algorithm,
            config,
            score,
            bic,
            edges: graph.edge_lines(),
        })
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let fmt_opt = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"));
        let mut out = String::new();
        out.push_str(&format!("algorithm: {}\n", self.algorithm));
        out.push_str(&format!("family: {}\n", self.algorithm.family()));
        match self.algorithm.family() {
            Family::Score => {
                out.push_str(&format!("score_type: {}\n", c.score));
            }
            Family::Constraint => {
                out.push_str(&format!("test: {}\nalpha: {}\n", c.test, c.alpha));
            }
            Family::Hybrid => {
                out.push_str(&format!("score_type: {}\ntest: {}\nalpha: {}\n", c.score, c.test, c.alpha));
            }
        }
        if self.algorithm.family() != Family::Constraint {
            out.push_str(&format!(
                "tabu_length: {}\nmax_iter: {}\nrestarts: {}\nperturb: {}\n",
                c.tabu_length, c.max_iter, c.restarts, c.perturb
            ));
        }
        if let Some(k) = c.max_condition {
            out.push_str(&format!("max_condition: {k}\n"));
        }
        out.push_str(&format!("seed: {}\n", c.seed));
        out.push_str(&format!("score: {}\n", fmt_opt(self.score)));
        out.push_str(&format!("bic: {}\n", fmt_opt(self.bic)));
        out.push_str(&format!("edges: {}\n", self.edges.len()));
        for e in &self.edges {
            out.push_str(&format!("  {e}\n"));
        }
        out
    }
}
