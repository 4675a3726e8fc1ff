//! TOML run configuration. Relative paths resolve against the config file's
//! directory.

use std::path::{Path, PathBuf};

use bnweights::citests::TestKind;
use bnweights::ensemble::{DEFAULT_BOOTSTRAP, DEFAULT_THRESHOLD};
use bnweights::learners::{AlgorithmId, LearnerConfig};
use bnweights::weights::{BnMode, RfConfig, Scheme};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub data: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub constraints: Option<PathBuf>,
    pub target: Option<String>,
    pub group: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub bootstrap: Option<usize>,
    pub threshold: Option<f64>,
    pub schemes: Option<Vec<String>>,
    pub external: Option<PathBuf>,
    pub network: Option<PathBuf>,
    pub mode: Option<String>,
    pub discount: Option<f64>,
    pub strength_algorithm: Option<String>,
    #[serde(default)]
    pub learner: LearnerSection,
    #[serde(default)]
    pub forest: ForestSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSection {
    pub alpha: Option<f64>,
    pub test: Option<String>,
    pub tabu_length: Option<usize>,
    pub max_iter: Option<usize>,
    pub restarts: Option<usize>,
    pub perturb: Option<usize>,
    pub max_condition: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestSection {
    pub trees: Option<usize>,
    pub mtry: Option<usize>,
    pub min_leaf: Option<usize>,
}

/// Command-line values that override the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub schemes: Option<Vec<String>>,
    pub threshold: Option<f64>,
    pub bootstrap: Option<usize>,
    pub mode: Option<String>,
    pub discount: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub constraints: Option<PathBuf>,
    pub target: Option<String>,
    pub group: Option<String>,
    pub out: PathBuf,
    pub seed: u64,
    pub bootstrap: usize,
    pub threshold: f64,
    pub schemes: Vec<Scheme>,
    pub external: Option<PathBuf>,
    pub network: Option<PathBuf>,
    pub mode: BnMode,
    pub strength_algorithm: Option<AlgorithmId>,
    pub learner: LearnerConfig,
    pub forest: RfConfig,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn parse_schemes(names: &[String]) -> Result<Vec<Scheme>, CliError> {
    let mut out: Vec<Scheme> = Vec::new();
    for n in names {
        let s: Scheme = n.trim().parse().map_err(|e: bnweights::Error| usage(e.to_string()))?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    if out.is_empty() {
        return Err(usage("no weighting schemes requested"));
    }
    Ok(out)
}

impl RunConfig {
    pub fn load(path: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let (file, base) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
                let file: FileConfig =
                    toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", p.display())))?;
                (file, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        Self::from_file(file, &base, o)
    }

    pub fn from_file(f: FileConfig, base: &Path, o: &Overrides) -> Result<Self, CliError> {
        let rel = |p: Option<PathBuf>| p.map(|p| if p.is_absolute() { p } else { base.join(p) });

        let mut learner = LearnerConfig::default();
        let l = &f.learner;
        if let Some(a) = l.alpha {
            learner.alpha = a;
        }
        if let Some(t) = &l.test {
            learner.test = t.parse::<TestKind>().map_err(|e| usage(e.to_string()))?;
        }
        learner.tabu_length = l.tabu_length.unwrap_or(learner.tabu_length);
        learner.max_iter = l.max_iter.unwrap_or(learner.max_iter);
        learner.restarts = l.restarts.unwrap_or(learner.restarts);
        learner.perturb = l.perturb.unwrap_or(learner.perturb);
        learner.max_condition = l.max_condition.or(learner.max_condition);
        learner.validate().map_err(|e| usage(e.to_string()))?;

        let seed = o.seed.or(f.seed).unwrap_or(0);
        learner.seed = seed;

        let mut forest = RfConfig::default();
        forest.trees = f.forest.trees.unwrap_or(forest.trees);
        forest.mtry = f.forest.mtry.or(forest.mtry);
        forest.min_leaf = f.forest.min_leaf.unwrap_or(forest.min_leaf);
        forest.seed = bnweights::seed::derive(seed, "forest");

        let bootstrap = o.bootstrap.or(f.bootstrap).unwrap_or(DEFAULT_BOOTSTRAP);
        if bootstrap == 0 {
            return Err(usage("bootstrap must be at least 1"));
        }
        let threshold = o.threshold.or(f.threshold).unwrap_or(DEFAULT_THRESHOLD);
        if !(threshold > 0.0 && threshold <= 11.0) {
            return Err(usage(format!("threshold must lie in (0, 11], got {threshold}")));
        }

        let schemes = match o.schemes.clone().or(f.schemes) {
            Some(names) => parse_schemes(&names)?,
            None => Scheme::ALL.iter().copied().filter(|s| *s != Scheme::External).collect(),
        };

        let mode = match o.mode.clone().or(f.mode).as_deref().unwrap_or("literal") {
            "literal" => BnMode::Literal,
            "dwi" => {
                let d = o.discount.or(f.discount).unwrap_or(0.5);
                if !(d > 0.0 && d <= 1.0) {
                    return Err(usage(format!("discount must lie in (0, 1], got {d}")));
                }
                BnMode::Dwi(d)
            }
            other => return Err(usage(format!("unknown mode {other:?}; valid: literal, dwi"))),
        };

        let strength_algorithm = f
            .strength_algorithm
            .map(|a| a.parse::<AlgorithmId>().map_err(|e| usage(e.to_string())))
            .transpose()?;

        Ok(RunConfig {
            data: rel(f.data),
            schema: rel(f.schema),
            constraints: rel(f.constraints),
            target: f.target,
            group: f.group,
            out: o.out.clone().or(rel(f.out)).unwrap_or_else(|| PathBuf::from("out")),
            seed,
            bootstrap,
            threshold,
            schemes,
            external: rel(f.external),
            network: rel(f.network),
            mode,
            strength_algorithm,
            learner,
            forest,
        })
    }
}
