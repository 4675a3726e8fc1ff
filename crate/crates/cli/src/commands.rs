use std::path::{Path, PathBuf};

use bnweights::dataset::{Dataset, Schema, ScoreMapping};
use bnweights::ensemble::{
    arc_strengths_with, consensus_table, robust_network, run_suite, select_representative, ArcOccurrenceTable,
    RobustNetwork, StrengthMap, SuiteConfig, SuiteResult,
};
use bnweights::graph::{arc_list_csv, parse_arc_list_csv, ConstraintSet, Dag};
use bnweights::index::{bump_chart_csv, composite_index, group_rankings, rank_shift_report, rankings_csv, DEFAULT_BASELINE};
use bnweights::learners::{learn, AlgorithmId, RunManifest};
use bnweights::parameters::{forward_sample, DiscreteBn};
use bnweights::seed;
use bnweights::weights::{
    bn_weights, equal_weights, external_weights, ols_weights, parse_weights_table, rf_weights, spearman_weights,
    weights_table_csv, Scheme, WeightVector,
};
use log::{info, warn};

use crate::config::RunConfig;
use crate::output::Outputs;
use crate::CliError;

pub const WEIGHTS_FILE: &str = "weights.csv";
pub const WEIGHTS_EXACT_FILE: &str = "weights_exact.csv";

struct Inputs {
    data: Dataset,
    constraints: ConstraintSet,
}

fn required<'a>(p: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, CliError> {
    p.as_deref()
        .ok_or_else(|| CliError::Usage(format!("config is missing `{key}`")))
}

fn load_inputs(cfg: &RunConfig) -> Result<Inputs, CliError> {
    let schema = Schema::load(required(&cfg.schema, "schema")?)?;
    if let Some(t) = &cfg.target {
        if t != schema.target_name() {
            return Err(CliError::Usage(format!(
                "target {t:?} does not match the schema target {:?}",
                schema.target_name()
            )));
        }
    }
    let data = Dataset::load_csv(required(&cfg.data, "data")?, schema)?;
    let constraints = match &cfg.constraints {
        Some(p) => ConstraintSet::load(p)?,
        None => ConstraintSet::empty(),
    };
    Ok(Inputs { data, constraints })
}

struct Learned {
    suite: SuiteResult,
    table: ArcOccurrenceTable,
    robust: RobustNetwork,
}

fn suite_config(cfg: &RunConfig) -> SuiteConfig {
    let mut base = cfg.learner.clone();
    base.seed = seed::derive(cfg.seed, "suite");
    SuiteConfig::new(base)
}

fn learn_all(cfg: &RunConfig, inputs: &Inputs) -> Result<Learned, CliError> {
    let suite = run_suite(&inputs.data, &inputs.constraints, &suite_config(cfg))?;
    let table = consensus_table(&suite);
    let robust = robust_network(&table, cfg.threshold)?;
    info!(
        "robust network: {} arcs at threshold {} ({} dropped to break cycles)",
        robust.arcs.len(),
        cfg.threshold,
        robust.dropped.len()
    );
    Ok(Learned { suite, table, robust })
}

fn robust_csv(rn: &RobustNetwork) -> String {
    let mut out = String::from("from,to,total\n");
    for a in &rn.arcs {
        out.push_str(&format!("{},{},{}\n", a.from, a.to, a.total));
    }
    out
}

pub fn learn_cmd(cfg: &RunConfig, only: Option<AlgorithmId>) -> Result<Outputs, CliError> {
    let inputs = load_inputs(cfg)?;
    let mut out = Outputs::default();
    if let Some(algo) = only {
        let lc = suite_config(cfg).for_algorithm(algo);
        let g = learn(algo, &inputs.data, &inputs.constraints, &lc)?;
        let m = RunManifest::new(algo, &lc, &g, &inputs.data)?;
        out.add(cfg.out.join(format!("manifests/{algo}.txt")), m.to_text());
        out.add(cfg.out.join(format!("graphs/{algo}.dot")), g.to_dot());
        return Ok(out);
    }
    let l = learn_all(cfg, &inputs)?;
    for e in l.suite.entries() {
        out.add(cfg.out.join(format!("manifests/{}.txt", e.algorithm)), e.manifest.to_text());
        out.add(cfg.out.join(format!("graphs/{}.dot", e.algorithm)), e.graph.to_dot());
    }
    out.add(cfg.out.join("consensus.csv"), l.table.to_csv());
    out.add(cfg.out.join("robust.csv"), robust_csv(&l.robust));
    out.add(
        cfg.out.join("robust.dot"),
        l.robust
            .dag
            .to_dot_labeled(|u, v| l.robust.total(l.robust.dag.name(u), l.robust.dag.name(v)).map(|t| t.to_string())),
    );
    Ok(out)
}

struct Strengths {
    dag: Dag,
    map: StrengthMap,
}

fn compute_strengths(cfg: &RunConfig, inputs: &Inputs) -> Result<Strengths, CliError> {
    let l = learn_all(cfg, inputs)?;
    let algo = match cfg.strength_algorithm {
        Some(a) => a,
        None => select_representative(&l.suite, &l.robust)?.0,
    };
    info!("bootstrap strengths with {algo}, B = {}", cfg.bootstrap);
    let map = arc_strengths_with(
        &inputs.data,
        algo,
        cfg.bootstrap,
        &inputs.constraints,
        seed::derive(cfg.seed, "strength"),
        &suite_config(cfg).for_algorithm(algo),
    )?;
    Ok(Strengths {
        dag: l.robust.dag,
        map,
    })
}

pub fn strength_cmd(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let inputs = load_inputs(cfg)?;
    let s = compute_strengths(cfg, &inputs)?;
    let mut out = Outputs::default();
    out.add(cfg.out.join("strengths.csv"), arc_list_csv(&s.map.records_for(&s.dag)));
    out.add(cfg.out.join("strengths_all.csv"), arc_list_csv(&s.map.records()));
    out.add(cfg.out.join("strengths.dot"), s.map.to_dot(&s.dag));
    let algo = s.map.algorithm.map(|a| a.to_string()).unwrap_or_default();
    out.add(
        cfg.out.join("strengths.txt"),
        format!(
            "algorithm: {algo}\nreplicates: {}\nfailures: {}\nseed: {}\n",
            s.map.replicates,
            s.map.failures,
            s.map.seed.unwrap_or_default()
        ),
    );
    Ok(out)
}

/// Robust network with strengths, read from an arc list or learned in-run.
fn network(cfg: &RunConfig, inputs: &Inputs) -> Result<Strengths, CliError> {
    match &cfg.network {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| bnweights::Error::Io {
                path: p.clone(),
                source: e,
            })?;
            let records = parse_arc_list_csv(&text)?;
            let names = inputs.data.schema().names();
            let mut dag = Dag::new(names.clone());
            for r in &records {
                let (u, v) = (dag.require(&r.from)?, dag.require(&r.to)?);
                dag.add_arc(u, v)?;
            }
            Ok(Strengths {
                map: StrengthMap::from_records(names, &records)?,
                dag,
            })
        }
        None => compute_strengths(cfg, inputs),
    }
}

fn compute_weights(cfg: &RunConfig, inputs: &Inputs, schemes: &[Scheme]) -> Result<Vec<WeightVector>, CliError> {
    let data = &inputs.data;
    let schema = data.schema();
    let target = schema.target_name().to_string();
    let dims = schema.dimension_names();
    let mut out = Vec::with_capacity(schemes.len());
    for &s in schemes {
        let w = match s {
            Scheme::Equal => equal_weights(&dims)?,
            Scheme::External => {
                let path = cfg
                    .external
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("scheme external needs `external` in the config".into()))?;
                external_weights(path, &dims)?
            }
            Scheme::Spearman => spearman_weights(data, &target, &dims)?,
            Scheme::Ols => ols_weights(data, &target, &dims)?,
            Scheme::Rf => rf_weights(data, &target, &dims, &cfg.forest)?,
            Scheme::Bn => {
                let net = network(cfg, inputs)?;
                bn_weights(&net.dag, &net.map, &target, &dims, cfg.mode)?
            }
        };
        for f in &w.flags {
            warn!("{s}: {f}");
        }
        out.push(w);
    }
    Ok(out)
}

pub fn weights_cmd(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let inputs = load_inputs(cfg)?;
    let vectors = compute_weights(cfg, &inputs, &cfg.schemes)?;
    let dims = inputs.data.schema().dimension_names();
    let mut out = Outputs::default();
    out.add(cfg.out.join(WEIGHTS_FILE), weights_table_csv(&vectors, &dims, Some(1))?);
    out.add(cfg.out.join(WEIGHTS_EXACT_FILE), weights_table_csv(&vectors, &dims, None)?);
    Ok(out)
}

pub fn compare_cmd(cfg: &RunConfig) -> Result<Outputs, CliError> {
    let inputs = load_inputs(cfg)?;
    let group = cfg
        .group
        .as_deref()
        .ok_or_else(|| CliError::Usage("compare needs `group` in the config".into()))?;
    let data = &inputs.data;
    let gvar = data.schema().require(group)?;

    let exact = cfg.out.join(WEIGHTS_EXACT_FILE);
    let mut vectors = if exact.exists() {
        info!("reading weights from {}", exact.display());
        let text = std::fs::read_to_string(&exact).map_err(|e| bnweights::Error::Io {
            path: exact.clone(),
            source: e,
        })?;
        parse_weights_table(&text)?
    } else {
        compute_weights(cfg, &inputs, &cfg.schemes)?
    };
    if !vectors.iter().any(|w| w.scheme == DEFAULT_BASELINE) {
        vectors.insert(0, equal_weights(&data.schema().dimension_names())?);
    }

    let scores = data.achievement_scores(&ScoreMapping::from_schema(data.schema()))?;
    let groups: Vec<&str> = (0..data.n()).map(|r| data.label(r, gvar)).collect();
    let tables = vectors
        .iter()
        .map(|w| group_rankings(&composite_index(&scores, w)?, &groups))
        .collect::<bnweights::Result<Vec<_>>>()?;
    let report = rank_shift_report(&tables, DEFAULT_BASELINE)?;

    let mut out = Outputs::default();
    out.add(cfg.out.join("rankings.csv"), rankings_csv(&tables));
    out.add(cfg.out.join("rank_shift.csv"), report.to_csv());
    out.add(cfg.out.join("bump_chart.csv"), bump_chart_csv(&tables));
    Ok(out)
}

pub fn simulate_cmd(bn: &Path, n: usize, seed: u64, out_path: &Path, schema_out: Option<&Path>) -> Result<Outputs, CliError> {
    let model = DiscreteBn::load(bn)?;
    if n == 0 {
        return Err(CliError::Usage("sample size must be at least 1".into()));
    }
    let data = forward_sample(&model, n, seed)?;
    let mut out = Outputs::default();
    out.add(out_path, data.to_csv_string());
    if let Some(p) = schema_out {
        out.add(p, model.schema().to_text());
    }
    Ok(out)
}
