//! Conditional-independence tests for categorical data.
//!
//! Both statistics are computed within each observed stratum of the
//! conditioning set and summed. Degrees of freedom are
//! `(|x| - 1)(|y| - 1)` per non-empty stratum; strata with no observations
//! contribute nothing.

use std::fmt;
use std::str::FromStr;

use statrs::function::gamma::gamma_ur;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TestKind {
    /// Log-likelihood ratio `G² = 2 Σ O ln(O / E)`.
    #[default]
    G2,
    /// Pearson `X² = Σ (O - E)² / E`.
    X2,
}

impl TestKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::G2 => "g2",
            TestKind::X2 => "x2",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g2" => Ok(TestKind::G2),
            "x2" => Ok(TestKind::X2),
            other => Err(Error::InvalidArgument(format!("unknown test {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub kind: TestKind,
    /// Set when x or y is constant within every stratum; such a test can
    /// never reject and reports `p = 1`.
    pub degenerate: bool,
}

/// Upper tail of the chi-square distribution, `P(X > statistic)`, via the
/// regularized upper incomplete gamma function `Q(dof / 2, statistic / 2)`.
pub fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    assert!(dof >= 1, "chi-square needs at least one degree of freedom");
    if statistic.is_nan() {
        return f64::NAN;
    }
    if statistic <= 0.0 {
        return 1.0;
    }
    if statistic.is_infinite() {
        return 0.0;
    }
    gamma_ur(dof as f64 / 2.0, statistic / 2.0).clamp(0.0, 1.0)
}

/// Tests `x ⟂ y | z` on schema indices.
pub fn ci_test(data: &Dataset, x: usize, y: usize, z: &[usize], kind: TestKind) -> Result<TestResult> {
    let m = data.m();
    if x >= m || y >= m || z.iter().any(|&v| v >= m) {
        return Err(Error::InvalidArgument("variable index out of range".into()));
    }
    if x == y {
        return Err(Error::InvalidArgument("x and y must differ".into()));
    }
    if z.contains(&x) || z.contains(&y) {
        return Err(Error::InvalidArgument("x and y must not be conditioned on".into()));
    }
    Ok(run(data, x, y, z, kind))
}

/// Tests `x ⟂ y | z` by variable name.
pub fn ci_test_by_name(data: &Dataset, x: &str, y: &str, z: &[&str], kind: TestKind) -> Result<TestResult> {
    let schema = data.schema();
    let xi = schema.require(x)?;
    let yi = schema.require(y)?;
    let zi = z
        .iter()
        .map(|v| schema.require(v))
        .collect::<Result<Vec<_>>>()?;
    ci_test(data, xi, yi, &zi, kind)
}

fn run(data: &Dataset, x: usize, y: usize, z: &[usize], kind: TestKind) -> TestResult {
    let rx = data.schema().cardinality(x);
    let ry = data.schema().cardinality(y);
    let mut zs = z.to_vec();
    zs.sort_unstable();
    let strata = data.strata(&zs);
    let cell = rx * ry;
    let mut counts = vec![0u64; strata.observed * cell];
    for ((&s, &a), &b) in strata.ids.iter().zip(data.column(x)).zip(data.column(y)) {
        counts[s as usize * cell + a as usize * ry + b as usize] += 1;
    }

    let mut statistic = 0.0;
    let mut degenerate = true;
    let mut row = vec![0u64; rx];
    let mut col = vec![0u64; ry];
    for table in counts.chunks_exact(cell) {
        row.iter_mut().for_each(|v| *v = 0);
        col.iter_mut().for_each(|v| *v = 0);
        for a in 0..rx {
            for b in 0..ry {
                let o = table[a * ry + b];
                row[a] += o;
                col[b] += o;
            }
        }
        let total: u64 = row.iter().sum();
        if total == 0 {
            continue;
        }
        let varied_x = row.iter().filter(|&&v| v > 0).count() > 1;
        let varied_y = col.iter().filter(|&&v| v > 0).count() > 1;
        if !(varied_x && varied_y) {
            continue;
        }
        degenerate = false;
        let total = total as f64;
        for a in 0..rx {
            for b in 0..ry {
                let expected = row[a] as f64 * col[b] as f64 / total;
                if expected == 0.0 {
                    continue;
                }
                let o = table[a * ry + b] as f64;
                statistic += match kind {
                    TestKind::G2 => {
                        if o > 0.0 {
                            2.0 * o * (o / expected).ln()
                        } else {
                            0.0
                        }
                    }
                    TestKind::X2 => (o - expected) * (o - expected) / expected,
                };
            }
        }
    }
    let dof = ((rx - 1) * (ry - 1) * strata.observed).max(1);
    if degenerate {
        return TestResult {
            statistic: 0.0,
            dof,
            p_value: 1.0,
            kind,
            degenerate: true,
        };
    }
    // tiny negative sums can appear from rounding when the table is exactly independent
    let statistic = statistic.max(0.0);
    TestResult {
        statistic,
        dof,
        p_value: chi_square_sf(statistic, dof),
        kind,
        degenerate: false,
    }
}

/// CI tester with a fixed test kind and significance level.
#[derive(Debug, Clone, Copy)]
pub struct CiTester<'a> {
    data: &'a Dataset,
    kind: TestKind,
    alpha: f64,
}

impl<'a> CiTester<'a> {
    pub fn new(data: &'a Dataset, kind: TestKind, alpha: f64) -> Self {
        CiTester { data, kind, alpha }
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn test(&self, x: usize, y: usize, z: &[usize]) -> TestResult {
        run(self.data, x, y, z, self.kind)
    }

    pub fn p_value(&self, x: usize, y: usize, z: &[usize]) -> f64 {
        self.test(x, y, z).p_value
    }

    /// True when independence is not rejected at level alpha.
    pub fn independent(&self, x: usize, y: usize, z: &[usize]) -> bool {
        self.p_value(x, y, z) >= self.alpha
    }
}
