//! Conditional probability tables and forward (ancestral) sampling.

use std::path::Path;
use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;

use crate::dataset::{Dataset, Role, Schema, VariableSpec};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::seed;

const HEADER: &str = "discrete-bn 1";
const SAMPLE_BLOCK: usize = 4096;

/// Probabilities of one node given each configuration of its parents.
/// Row `j` of `probs` (length `r`) belongs to parent configuration `j`,
/// encoded in mixed radix over `parents` with the first parent slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub parents: Vec<usize>,
    pub cardinality: usize,
    pub probs: Vec<f64>,
}

impl Cpt {
    pub fn configurations(&self) -> usize {
        self.probs.len() / self.cardinality
    }

    pub fn row(&self, config: usize) -> &[f64] {
        &self.probs[config * self.cardinality..(config + 1) * self.cardinality]
    }
}

/// A DAG over the schema's variables (same order) with one CPT per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBn {
    schema: Arc<Schema>,
    dag: Dag,
    cpts: Vec<Cpt>,
}

fn config_index(parents: &[usize], cards: &[usize], values: &[usize]) -> usize {
    parents
        .iter()
        .fold(0, |acc, &p| acc * cards[p] + values[p])
}

impl DiscreteBn {
    /// Builds a network from explicit CPT rows (`probs[node]` is q × r,
    /// row-major). Rows must be nonnegative and sum to 1 within 1e-9;
    /// they are renormalized exactly.
    pub fn new(schema: Schema, dag: Dag, probs: Vec<Vec<f64>>) -> Result<Self> {
        if dag.nodes() != schema.names().as_slice() {
            return Err(Error::InvalidArgument(
                "network nodes must match the schema variables in order".into(),
            ));
        }
        if probs.len() != schema.len() {
            return Err(Error::InvalidArgument("one CPT per node required".into()));
        }
        let cards: Vec<usize> = (0..schema.len()).map(|v| schema.cardinality(v)).collect();
        let mut cpts = Vec::with_capacity(schema.len());
        for (v, mut p) in probs.into_iter().enumerate() {
            let parents: Vec<usize> = dag.parents(v).iter().copied().collect();
            let q: usize = parents.iter().map(|&u| cards[u]).product();
            let r = cards[v];
            if p.len() != q * r {
                return Err(Error::InvalidArgument(format!(
                    "{}: CPT has {} entries, expected {}",
                    dag.name(v),
                    p.len(),
                    q * r
                )));
            }
            for row in p.chunks_exact_mut(r) {
                if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "{}: negative or non-finite probability",
                        dag.name(v)
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidArgument(format!(
                        "{}: CPT row sums to {sum}",
                        dag.name(v)
                    )));
                }
                row.iter_mut().for_each(|x| *x /= sum);
            }
            cpts.push(Cpt {
                parents,
                cardinality: r,
                probs: p,
            });
        }
        Ok(DiscreteBn {
            schema: Arc::new(schema),
            dag,
            cpts,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpt(&self, node: usize) -> &Cpt {
        &self.cpts[node]
    }

    /// Probability of `value` for `node` given a full assignment of its parents.
    pub fn probability(&self, node: usize, value: usize, assignment: &[usize]) -> f64 {
        let cards: Vec<usize> = (0..self.schema.len())
            .map(|v| self.schema.cardinality(v))
            .collect();
        let cpt = &self.cpts[node];
        cpt.row(config_index(&cpt.parents, &cards, assignment))[value]
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        DiscreteBn::parse(&text)
    }

    /// Parses the text form:
    ///
    /// ```text
    /// discrete-bn 1
    /// node A dimension lo,hi
    /// node T target 0,1
    /// parents T A
    /// cpt A | 0.3 0.7
    /// cpt T lo | 0.9 0.1
    /// cpt T hi | 0.2 0.8
    /// ```
    ///
    /// `parents` lines are optional for root nodes. A `cpt` line lists the
    /// parent labels (in `parents` order) before the bar.
    pub fn parse(text: &str) -> Result<Self> {
        let ctx = "network";
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, HEADER)) => {}
            Some((n, other)) => {
                return Err(Error::parse(ctx, n, format!("expected `{HEADER}`, found `{other}`")))
            }
            None => return Err(Error::parse(ctx, 1, "empty network file")),
        }
        let mut vars: Vec<VariableSpec> = Vec::new();
        let mut parent_lines: Vec<(usize, String, Vec<String>)> = Vec::new();
        let mut cpt_lines: Vec<(usize, String, Vec<String>, Vec<f64>)> = Vec::new();
        for (lineno, line) in lines {
            let mut words = line.split_whitespace();
            match words.next() {
                Some("node") => {
                    let (name, role, cats) = match (words.next(), words.next(), words.next(), words.next()) {
                        (Some(n), Some(r), Some(c), None) => (n, r, c),
                        _ => return Err(Error::parse(ctx, lineno, "expected `node NAME ROLE CAT,CAT,...`")),
                    };
                    let role: Role = role
                        .parse()
                        .map_err(|e: Error| Error::parse(ctx, lineno, e.to_string()))?;
                    let cats: Vec<&str> = cats.split(',').collect();
                    vars.push(VariableSpec::new(name, &cats, role));
                }
                Some("parents") => {
                    let node = words
                        .next()
                        .ok_or_else(|| Error::parse(ctx, lineno, "missing node"))?;
                    parent_lines.push((lineno, node.to_string(), words.map(str::to_string).collect()));
                }
                Some("cpt") => {
                    let (head, tail) = line["cpt".len()..]
                        .split_once('|')
                        .ok_or_else(|| Error::parse(ctx, lineno, "missing `|`"))?;
                    let mut head = head.split_whitespace();
                    let node = head
                        .next()
                        .ok_or_else(|| Error::parse(ctx, lineno, "missing node"))?;
                    let labels = head.map(str::to_string).collect();
                    let probs = tail
                        .split_whitespace()
                        .map(|p| p.parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| Error::parse(ctx, lineno, format!("bad probability: {e}")))?;
                    cpt_lines.push((lineno, node.to_string(), labels, probs));
                }
                Some(other) => {
                    return Err(Error::parse(ctx, lineno, format!("unknown directive `{other}`")))
                }
                None => unreachable!("blank lines filtered"),
            }
        }
        let schema = Schema::new(vars).map_err(|e| Error::parse(ctx, 1, e.to_string()))?;
        let mut dag = Dag::new(schema.names());
        for (lineno, node, parents) in &parent_lines {
            let v = schema
                .index_of(node)
                .ok_or_else(|| Error::parse(ctx, *lineno, format!("unknown node {node}")))?;
            for p in parents {
                let u = schema
                    .index_of(p)
                    .ok_or_else(|| Error::parse(ctx, *lineno, format!("unknown parent {p}")))?;
                dag.add_arc(u, v)
                    .map_err(|e| Error::parse(ctx, *lineno, e.to_string()))?;
            }
        }
        let cards: Vec<usize> = (0..schema.len()).map(|v| schema.cardinality(v)).collect();
        let mut probs: Vec<Vec<Option<Vec<f64>>>> = (0..schema.len())
            .map(|v| {
                let q: usize = dag.parents(v).iter().map(|&p| cards[p]).product();
                vec![None; q]
            })
            .collect();
        for (lineno, node, labels, row) in cpt_lines {
            let v = schema
                .index_of(&node)
                .ok_or_else(|| Error::parse(ctx, lineno, format!("unknown node {node}")))?;
            let parents: Vec<usize> = dag.parents(v).iter().copied().collect();
            if labels.len() != parents.len() {
                return Err(Error::parse(
                    ctx,
                    lineno,
                    format!("{node} has {} parents, row lists {}", parents.len(), labels.len()),
                ));
            }
            let mut values = vec![0; schema.len()];
            for (&p, label) in parents.iter().zip(&labels) {
                values[p] = schema.variable(p).category_index(label).ok_or_else(|| {
                    Error::parse(ctx, lineno, format!("unknown category {label} of {}", schema.variable(p).name))
                })?;
            }
            if row.len() != cards[v] {
                return Err(Error::parse(
                    ctx,
                    lineno,
                    format!("{node} has {} categories, row lists {}", cards[v], row.len()),
                ));
            }
            let slot = &mut probs[v][config_index(&parents, &cards, &values)];
            if slot.is_some() {
                return Err(Error::parse(ctx, lineno, "duplicate CPT row"));
            }
            *slot = Some(row);
        }
        let mut flat = Vec::with_capacity(schema.len());
        for (v, rows) in probs.into_iter().enumerate() {
            let mut p = Vec::new();
            for row in rows {
                let row = row.ok_or_else(|| {
                    Error::parse(ctx, 1, format!("missing CPT row for {}", schema.variable(v).name))
                })?;
                p.extend(row);
            }
            flat.push(p);
        }
        DiscreteBn::new(schema, dag, flat)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER}\n");
        for v in self.schema.variables() {
            out.push_str(&format!("node {} {} {}\n", v.name, v.role, v.categories.join(",")));
        }
        for v in 0..self.schema.len() {
            let cpt = &self.cpts[v];
            if !cpt.parents.is_empty() {
                let names: Vec<&str> = cpt.parents.iter().map(|&p| self.dag.name(p)).collect();
                out.push_str(&format!("parents {} {}\n", self.dag.name(v), names.join(" ")));
            }
        }
        for v in 0..self.schema.len() {
            let cpt = &self.cpts[v];
            let cards: Vec<usize> = cpt.parents.iter().map(|&p| self.schema.cardinality(p)).collect();
            for j in 0..cpt.configurations() {
                let mut labels = Vec::with_capacity(cards.len());
                let mut rest = j;
                for (k, &card) in cards.iter().enumerate().rev() {
                    let p = cpt.parents[k];
                    labels.push(self.schema.variable(p).categories[rest % card].as_str());
                    rest /= card;
                }
                labels.reverse();
                let probs: Vec<String> = cpt.row(j).iter().map(|x| x.to_string()).collect();
                let head = if labels.is_empty() {
                    self.dag.name(v).to_string()
                } else {
                    format!("{} {}", self.dag.name(v), labels.join(" "))
                };
                out.push_str(&format!("cpt {head} | {}\n", probs.join(" ")));
            }
        }
        out
    }
}

/// Fits CPTs of `g` to `data`: cell = (count + pseudo) / (config total + pseudo · r).
/// With `pseudo_count = 0`, unobserved parent configurations get a uniform row.
/// Graph nodes are matched to schema variables by name; the network's
/// schema lists the graph's nodes in graph order.
pub fn fit_cpts(g: &Dag, data: &Dataset, pseudo_count: f64) -> Result<DiscreteBn> {
    if !(pseudo_count >= 0.0) || !pseudo_count.is_finite() {
        return Err(Error::InvalidArgument("pseudo_count must be >= 0".into()));
    }
    let schema = data.schema();
    let map = g
        .nodes()
        .iter()
        .map(|name| schema.require(name))
        .collect::<Result<Vec<_>>>()?;
    let sub_schema = Schema::new(map.iter().map(|&i| schema.variable(i).clone()).collect())?;
    let mut probs = Vec::with_capacity(map.len());
    for v in 0..g.node_count() {
        let parents: Vec<usize> = g.parents(v).iter().copied().collect();
        let cards: Vec<usize> = parents.iter().map(|&p| schema.cardinality(map[p])).collect();
        let r = schema.cardinality(map[v]);
        let q: usize = cards.iter().product();
        let mut counts = vec![0u64; q * r];
        let child = data.column(map[v]);
        for row in 0..data.n() {
            let j = parents
                .iter()
                .zip(&cards)
                .fold(0, |acc, (&p, &card)| acc * card + data.column(map[p])[row] as usize);
            counts[j * r + child[row] as usize] += 1;
        }
        let mut p = Vec::with_capacity(q * r);
        for row in counts.chunks_exact(r) {
            let total: u64 = row.iter().sum();
            let denom = total as f64 + pseudo_count * r as f64;
            if denom == 0.0 {
                p.extend(std::iter::repeat(1.0 / r as f64).take(r));
            } else {
                p.extend(row.iter().map(|&c| (c as f64 + pseudo_count) / denom));
            }
        }
        probs.push(p);
    }
    DiscreteBn::new(sub_schema, g.clone(), probs)
}

/// Ancestral sampling in topological order. Rows are generated in blocks
/// of 4096, each block from its own stream seeded by
/// `seed::derive(seed, "block-<i>")`, so the output is independent of how
/// many threads run.
pub fn forward_sample(bn: &DiscreteBn, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let m = bn.schema.len();
    let order = bn.dag.topological_order();
    let cards: Vec<usize> = (0..m).map(|v| bn.schema.cardinality(v)).collect();
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    let chunks: Vec<Vec<Vec<u16>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let rows = SAMPLE_BLOCK.min(n - b * SAMPLE_BLOCK);
            let mut rng = seed::derived_rng(seed, &format!("block-{b}"));
            let mut cols = vec![Vec::with_capacity(rows); m];
            let mut values = vec![0usize; m];
            for _ in 0..rows {
                for &v in &order {
                    let cpt = &bn.cpts[v];
                    let row = cpt.row(config_index(&cpt.parents, &cards, &values));
                    values[v] = draw(row, rng.gen::<f64>());
                }
                for (col, &x) in cols.iter_mut().zip(&values) {
                    col.push(x as u16);
                }
            }
            cols
        })
        .collect();
    let mut columns: Vec<Vec<u16>> = vec![Vec::with_capacity(n); m];
    for chunk in chunks {
        for (col, part) in columns.iter_mut().zip(chunk) {
            col.extend(part);
        }
    }
    Dataset::from_columns(Arc::clone(&bn.schema), columns)
}

/// Inverse-CDF draw from a probability row given u ∈ [0, 1).
fn draw(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // rounding left u above the cumulative sum: take the last possible category
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
}
