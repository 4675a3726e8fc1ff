//! Categorical datasets: schema, CSV ingest, contingency counts, bootstrap
//! resampling and achievement scores.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Dimension,
    Target,
    Control,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Dimension => "dimension",
            Role::Target => "target",
            Role::Control => "control",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dimension" => Ok(Role::Dimension),
            "target" => Ok(Role::Target),
            "control" => Ok(Role::Control),
            other => Err(Error::Schema(format!(
                "unknown role {other:?} (expected dimension, target or control)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableSpec {
    pub name: String,
    pub categories: Vec<String>,
    pub role: Role,
    /// Optional achievement score per category, in declaration order.
    pub scores: Option<Vec<f64>>,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, categories: &[&str], role: Role) -> Self {
        VariableSpec {
            name: name.into(),
            categories: categories.iter().map(|c| c.to_string()).collect(),
            role,
            scores: None,
        }
    }

    pub fn with_scores(mut self, scores: Vec<f64>) -> Self {
        self.scores = Some(scores);
        self
    }

    pub fn cardinality(&self) -> usize {
        self.categories.len()
    }

    pub fn category_index(&self, label: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == label)
    }
}

/// Validated list of variables. Exactly one variable has the target role.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    vars: Vec<VariableSpec>,
    target: usize,
}

impl Schema {
    pub fn new(vars: Vec<VariableSpec>) -> Result<Self> {
        if vars.len() < 2 {
            return Err(Error::Schema("at least two variables are required".into()));
        }
        let mut names = HashSet::new();
        for v in &vars {
            if v.name.is_empty() || v.name.contains(',') || v.name.trim() != v.name {
                return Err(Error::Schema(format!("invalid variable name {:?}", v.name)));
            }
            if !names.insert(v.name.as_str()) {
                return Err(Error::Schema(format!("duplicate variable {:?}", v.name)));
            }
            if v.categories.is_empty() {
                return Err(Error::Schema(format!("{}: no categories", v.name)));
            }
            if v.categories.len() > u16::MAX as usize {
                return Err(Error::Schema(format!("{}: too many categories", v.name)));
            }
            let mut seen = HashSet::new();
            for c in &v.categories {
                if c.is_empty() || c.contains(',') {
                    return Err(Error::Schema(format!("{}: invalid category {c:?}", v.name)));
                }
                if !seen.insert(c.as_str()) {
                    return Err(Error::Schema(format!("{}: duplicate category {c:?}", v.name)));
                }
            }
            if let Some(scores) = &v.scores {
                check_score_table(&v.name, scores, v.cardinality())?;
            }
        }
        let targets: Vec<usize> = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.role == Role::Target)
            .map(|(i, _)| i)
            .collect();
        if targets.len() != 1 {
            return Err(Error::Schema(format!(
                "exactly one target variable required, found {}",
                targets.len()
            )));
        }
        Ok(Schema {
            vars,
            target: targets[0],
        })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.vars
    }

    pub fn variable(&self, index: usize) -> &VariableSpec {
        &self.vars[index]
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn cardinality(&self, index: usize) -> usize {
        self.vars[index].cardinality()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn target_name(&self) -> &str {
        &self.vars[self.target].name
    }

    /// Indices of dimension-role variables, in declaration order.
    pub fn dimensions(&self) -> Vec<usize> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.role == Role::Dimension)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn dimension_names(&self) -> Vec<String> {
        self.dimensions()
            .into_iter()
            .map(|i| self.vars[i].name.clone())
            .collect()
    }

    /// Parses the key-value schema format.
    ///
    /// ```text
    /// # comment
    /// name = HEALTH
    /// role = dimension
    /// categories = bad, fair, good
    /// scores = 0, 0.4, 1        # optional
    /// ```
    ///
    /// Each `name` line opens a new variable.
    pub fn parse(text: &str) -> Result<Self> {
        let ctx = "schema";
        let mut vars: Vec<(usize, VariableSpec, bool)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(ctx, lineno, "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim();
            if key == "name" {
                if value.is_empty() {
                    return Err(Error::parse(ctx, lineno, "empty variable name"));
                }
                vars.push((
                    lineno,
                    VariableSpec {
                        name: value.to_string(),
                        categories: Vec::new(),
                        role: Role::Dimension,
                        scores: None,
                    },
                    false,
                ));
                continue;
            }
            let (_, current, has_role) = vars
                .last_mut()
                .ok_or_else(|| Error::parse(ctx, lineno, format!("`{key}` before any `name`")))?;
            match key {
                "role" => {
                    current.role = value
                        .parse()
                        .map_err(|e: Error| Error::parse(ctx, lineno, e.to_string()))?;
                    *has_role = true;
                }
                "categories" => {
                    current.categories = split_list(value);
                }
                "scores" => {
                    let scores = split_list(value)
                        .iter()
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| Error::parse(ctx, lineno, format!("bad score: {e}")))?;
                    current.scores = Some(scores);
                }
                other => {
                    return Err(Error::parse(ctx, lineno, format!("unknown key `{other}`")));
                }
            }
        }
        for (lineno, v, has_role) in &vars {
            if !has_role {
                return Err(Error::parse(ctx, *lineno, format!("{}: missing role", v.name)));
            }
        }
        Schema::new(vars.into_iter().map(|(_, v, _)| v).collect())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Schema::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vars {
            out.push_str(&format!("name = {}\n", v.name));
            out.push_str(&format!("role = {}\n", v.role));
            out.push_str(&format!("categories = {}\n", v.categories.join(", ")));
            if let Some(scores) = &v.scores {
                let s: Vec<String> = scores.iter().map(|x| x.to_string()).collect();
                out.push_str(&format!("scores = {}\n", s.join(", ")));
            }
            out.push('\n');
        }
        out
    }
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn check_score_table(name: &str, scores: &[f64], cardinality: usize) -> Result<()> {
    if scores.len() != cardinality {
        return Err(Error::InvalidArgument(format!(
            "{name}: score mapping covers {} of {cardinality} categories",
            scores.len()
        )));
    }
    if let Some(bad) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::InvalidArgument(format!(
            "{name}: score {bad} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Immutable table of categorical observations, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Arc<Schema>,
    columns: Vec<Vec<u16>>,
    n: usize,
}

impl Dataset {
    /// Builds a dataset from row-major category indices.
    pub fn new(schema: Schema, rows: &[Vec<usize>]) -> Result<Self> {
        let m = schema.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); m];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidArgument(format!(
                    "row {} has {} cells, expected {m}",
                    r + 1,
                    row.len()
                )));
            }
            for (c, &value) in row.iter().enumerate() {
                if value >= schema.cardinality(c) {
                    return Err(Error::InvalidArgument(format!(
                        "row {}, column {}: index {value} out of range",
                        r + 1,
                        schema.variable(c).name
                    )));
                }
                columns[c].push(value as u16);
            }
        }
        Dataset::from_columns(Arc::new(schema), columns)
    }

    pub fn from_columns(schema: Arc<Schema>, columns: Vec<Vec<u16>>) -> Result<Self> {
        if columns.len() != schema.len() {
            return Err(Error::InvalidArgument(format!(
                "{} columns for {} variables",
                columns.len(),
                schema.len()
            )));
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::InvalidArgument("dataset has no rows".into()));
        }
        for (c, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidArgument("ragged columns".into()));
            }
            let card = schema.cardinality(c);
            if let Some(r) = col.iter().position(|&v| v as usize >= card) {
                return Err(Error::InvalidArgument(format!(
                    "row {}, column {}: index out of range",
                    r + 1,
                    schema.variable(c).name
                )));
            }
        }
        Ok(Dataset { schema, columns, n })
    }

    pub fn read_csv<R: Read>(reader: R, schema: Schema) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut position = Vec::with_capacity(header.len());
        let mut seen = HashSet::new();
        for h in &header {
            let idx = schema
                .index_of(h)
                .ok_or_else(|| Error::HeaderMismatch(format!("column {h:?} not in schema")))?;
            if !seen.insert(idx) {
                return Err(Error::HeaderMismatch(format!("column {h:?} repeated")));
            }
            position.push(idx);
        }
        if let Some(missing) = schema.variables().iter().find(|v| {
            !header.iter().any(|h| h == &v.name)
        }) {
            return Err(Error::HeaderMismatch(format!(
                "schema variable {:?} has no column",
                missing.name
            )));
        }

        let lookups: Vec<HashMap<&str, u16>> = schema
            .variables()
            .iter()
            .map(|v| {
                v.categories
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (c.as_str(), i as u16))
                    .collect()
            })
            .collect();
        let mut columns = vec![Vec::new(); schema.len()];
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            let row = r + 1;
            for (cell, &var) in record.iter().zip(&position) {
                let name = &schema.variable(var).name;
                if cell.is_empty() || cell == "NA" {
                    return Err(Error::MissingValue {
                        row,
                        column: name.clone(),
                    });
                }
                let code = *lookups[var].get(cell).ok_or_else(|| Error::UnknownCategory {
                    row,
                    column: name.clone(),
                    label: cell.to_string(),
                })?;
                columns[var].push(code);
            }
        }
        if columns[0].is_empty() {
            return Err(Error::InvalidArgument("dataset has no rows".into()));
        }
        Dataset::from_columns(Arc::new(schema), columns)
    }

    pub fn load_csv(path: impl AsRef<Path>, schema: Schema) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Dataset::read_csv(std::io::BufReader::new(file), schema)
    }

    /// Writes the dataset with a header in schema order and category labels as cells.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.schema.variables().iter().map(|v| v.name.as_str()))?;
        let mut record = Vec::with_capacity(self.columns.len());
        for r in 0..self.n {
            record.clear();
            for (c, col) in self.columns.iter().enumerate() {
                record.push(self.schema.variable(c).categories[col[r] as usize].as_str());
            }
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("labels are UTF-8")
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn shared_schema(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, var: usize) -> &[u16] {
        &self.columns[var]
    }

    pub fn value(&self, row: usize, var: usize) -> usize {
        self.columns[var][row] as usize
    }

    pub fn row(&self, row: usize) -> Vec<usize> {
        self.columns.iter().map(|c| c[row] as usize).collect()
    }

    pub fn label(&self, row: usize, var: usize) -> &str {
        &self.schema.variable(var).categories[self.value(row, var)]
    }

    /// Contingency counts over the named variables.
    pub fn counts(&self, vars: &[&str]) -> Result<ContingencyTable> {
        let idx = vars
            .iter()
            .map(|v| self.schema.require(v))
            .collect::<Result<Vec<_>>>()?;
        self.counts_by_index(&idx)
    }

    pub fn counts_by_index(&self, vars: &[usize]) -> Result<ContingencyTable> {
        if vars.is_empty() {
            return Err(Error::InvalidArgument("counts over an empty variable list".into()));
        }
        let mut seen = HashSet::new();
        for &v in vars {
            if v >= self.m() {
                return Err(Error::UnknownVariable(format!("#{v}")));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidArgument(format!(
                    "variable {:?} listed twice",
                    self.schema.variable(v).name
                )));
            }
        }
        let cards: Vec<usize> = vars.iter().map(|&v| self.schema.cardinality(v)).collect();
        let size = cards
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .filter(|&s| s <= 1 << 28)
            .ok_or_else(|| Error::InvalidArgument("contingency table too large".into()))?;
        let mut counts = vec![0u64; size];
        for r in 0..self.n {
            let mut cell = 0usize;
            for (&v, &card) in vars.iter().zip(&cards) {
                cell = cell * card + self.columns[v][r] as usize;
            }
            counts[cell] += 1;
        }
        Ok(ContingencyTable {
            variables: vars
                .iter()
                .map(|&v| self.schema.variable(v).name.clone())
                .collect(),
            cardinalities: cards,
            counts,
            total: self.n as u64,
        })
    }

    /// Compact stratum id per row for the joint configuration of `vars`.
    /// Ids are dense over observed configurations, numbered in order of
    /// first appearance. An empty `vars` yields a single stratum.
    pub(crate) fn strata(&self, vars: &[usize]) -> Strata {
        if vars.is_empty() {
            return Strata {
                ids: vec![0; self.n],
                observed: 1,
            };
        }
        if vars.len() == 1 {
            let v = vars[0];
            let card = self.schema.cardinality(v);
            let mut remap = vec![u32::MAX; card];
            let mut next = 0u32;
            let ids = self.columns[v]
                .iter()
                .map(|&x| {
                    let slot = &mut remap[x as usize];
                    if *slot == u32::MAX {
                        *slot = next;
                        next += 1;
                    }
                    *slot
                })
                .collect();
            return Strata {
                ids,
                observed: next as usize,
            };
        }
        let cards: Vec<u128> = vars
            .iter()
            .map(|&v| self.schema.cardinality(v) as u128)
            .collect();
        let mut remap: HashMap<u128, u32> = HashMap::new();
        let mut ids = Vec::with_capacity(self.n);
        for r in 0..self.n {
            let mut code = 0u128;
            for (&v, &card) in vars.iter().zip(&cards) {
                code = code
                    .checked_mul(card)
                    .and_then(|c| c.checked_add(self.columns[v][r] as u128))
                    .expect("joint configuration code overflows u128");
            }
            let next = remap.len() as u32;
            ids.push(*remap.entry(code).or_insert(next));
        }
        Strata {
            ids,
            observed: remap.len(),
        }
    }

    /// Draws `n` rows with replacement; a pure function of `(self, seed)`.
    pub fn bootstrap_resample(&self, seed: u64) -> Dataset {
        let mut rng = seed::rng(seed);
        let picks: Vec<usize> = (0..self.n).map(|_| rng.gen_range(0..self.n)).collect();
        self.select_rows(&picks)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|col| rows.iter().map(|&r| col[r]).collect())
            .collect();
        Dataset {
            schema: Arc::clone(&self.schema),
            columns,
            n: rows.len(),
        }
    }

    /// Achievement scores of every dimension-role variable.
    pub fn achievement_scores(&self, mapping: &ScoreMapping) -> Result<ScoreMatrix> {
        let dims = self.schema.dimensions();
        let tables = dims
            .iter()
            .map(|&d| mapping.table(self.schema.variable(d)))
            .collect::<Result<Vec<_>>>()?;
        let mut values = Vec::with_capacity(self.n * dims.len());
        for r in 0..self.n {
            for (&d, table) in dims.iter().zip(&tables) {
                values.push(table[self.columns[d][r] as usize]);
            }
        }
        Ok(ScoreMatrix {
            dims: dims
                .iter()
                .map(|&d| self.schema.variable(d).name.clone())
                .collect(),
            n: self.n,
            values,
        })
    }

    /// Achievement score of one variable (any role) for every row.
    pub fn variable_scores(&self, var: usize, mapping: &ScoreMapping) -> Result<Vec<f64>> {
        let table = mapping.table(self.schema.variable(var))?;
        Ok(self.columns[var]
            .iter()
            .map(|&c| table[c as usize])
            .collect())
    }
}

pub(crate) struct Strata {
    pub ids: Vec<u32>,
    pub observed: usize,
}

/// Dense count array over the cross product of categories; the last
/// variable varies fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub variables: Vec<String>,
    pub cardinalities: Vec<usize>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    pub fn index(&self, cell: &[usize]) -> usize {
        assert_eq!(cell.len(), self.cardinalities.len());
        cell.iter()
            .zip(&self.cardinalities)
            .fold(0, |acc, (&c, &card)| {
                assert!(c < card, "category index out of range");
                acc * card + c
            })
    }

    pub fn get(&self, cell: &[usize]) -> u64 {
        self.counts[self.index(cell)]
    }

    /// Sums out every variable not listed in `keep`; `keep` order is preserved.
    pub fn marginalize(&self, keep: &[&str]) -> Result<ContingencyTable> {
        let pos = keep
            .iter()
            .map(|k| {
                self.variables
                    .iter()
                    .position(|v| v == k)
                    .ok_or_else(|| Error::UnknownVariable(k.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let cards: Vec<usize> = pos.iter().map(|&p| self.cardinalities[p]).collect();
        let size: usize = cards.iter().product();
        let mut counts = vec![0u64; size];
        let mut cell = vec![0usize; self.cardinalities.len()];
        for &count in &self.counts {
            let target = pos
                .iter()
                .zip(&cards)
                .fold(0, |acc, (&p, &card)| acc * card + cell[p]);
            counts[target] += count;
            // odometer increment, last variable fastest
            for i in (0..cell.len()).rev() {
                cell[i] += 1;
                if cell[i] < self.cardinalities[i] {
                    break;
                }
                cell[i] = 0;
            }
        }
        Ok(ContingencyTable {
            variables: keep.iter().map(|k| k.to_string()).collect(),
            cardinalities: cards,
            counts,
            total: self.total,
        })
    }
}

/// Per-variable achievement score tables. Variables without an explicit
/// table use `index / (cardinality - 1)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreMapping {
    tables: BTreeMap<String, Vec<f64>>,
}

impl ScoreMapping {
    pub fn new() -> Self {
        Self::default()
    }

    /// Collects the score tables declared in the schema.
    pub fn from_schema(schema: &Schema) -> Self {
        let tables = schema
            .variables()
            .iter()
            .filter_map(|v| v.scores.clone().map(|s| (v.name.clone(), s)))
            .collect();
        ScoreMapping { tables }
    }

    pub fn with(mut self, var: impl Into<String>, scores: Vec<f64>) -> Self {
        self.tables.insert(var.into(), scores);
        self
    }

    pub fn table(&self, var: &VariableSpec) -> Result<Vec<f64>> {
        match self.tables.get(&var.name) {
            Some(t) => {
                check_score_table(&var.name, t, var.cardinality())?;
                Ok(t.clone())
            }
            None => {
                let r = var.cardinality();
                if r == 1 {
                    return Ok(vec![0.0]);
                }
                Ok((0..r).map(|i| i as f64 / (r - 1) as f64).collect())
            }
        }
    }
}

/// n × d achievement scores in [0, 1], row-major, one column per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub dims: Vec<String>,
    pub n: usize,
    pub values: Vec<f64>,
}

impl ScoreMatrix {
    pub fn new(dims: Vec<String>, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * dims.len() {
            return Err(Error::InvalidArgument("score matrix shape mismatch".into()));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument("score outside [0, 1]".into()));
        }
        Ok(ScoreMatrix { dims, n, values })
    }

    pub fn d(&self) -> usize {
        self.dims.len()
    }

    pub fn get(&self, unit: usize, dim: usize) -> f64 {
        self.values[unit * self.dims.len() + dim]
    }

    pub fn row(&self, unit: usize) -> &[f64] {
        let d = self.dims.len();
        &self.values[unit * d..(unit + 1) * d]
    }

    pub fn column(&self, dim: usize) -> Vec<f64> {
        (0..self.n).map(|u| self.get(u, dim)).collect()
    }
}
