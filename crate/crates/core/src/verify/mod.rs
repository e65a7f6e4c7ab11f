//! Named verification suites: seeded sample loops with one verdict per check.

pub mod sample;
mod suites;

use std::fmt::Write as _;

use thiserror::Error;

use crate::dist::DistError;
use crate::group::GroupError;
use crate::mahler::MahlerError;
use crate::padic::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Mahler(#[from] MahlerError),
    #[error("suite `{suite}` does not apply to group {group}")]
    Unsupported { suite: String, group: String },
}

/// Suite ids with the statement each one exercises.
pub const SUITES: &[(&str, &str)] = &[
    ("lemma41", "structure constants obey v_p(c_{bg,a}) >= max(0, tau b + tau g - tau a)"),
    ("prop42", "the r-norms are submultiplicative"),
    ("lemma44", "commutators b_i b_j - b_j b_i are strictly smaller than b_i b_j"),
    ("thm45-mult", "the r-norm is multiplicative for 1/p < r < 1 in p^Q"),
    ("thm45-graded", "principal symbols multiply in the commutative graded ring"),
    ("basis-inv", "the r-norm does not depend on the ordered basis"),
    ("sect5-qnorm", "q_r on D(H) + D(H) delta_sigma is submultiplicative"),
    ("sect5-conj", "conjugation by group elements is an r-isometry"),
    ("lemma412", "integral elements have a radius r(a) beyond which F^s + pR meets R in F^s"),
    ("amice", "Mahler coefficients and their decay against rho^k"),
    ("mahler-dirac", "pairing a Dirac distribution with f evaluates f"),
    ("dsmooth-proj", "projection to finite group algebras is an algebra map"),
    ("prop814", "grade = d + 1 - Krull dimension of the saturated symbol ideal"),
    ("thm812-smooth", "log(1+b_i) acts as the derivative and its symbols cut out a point"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub p: u64,
    pub cap: u32,
    pub trunc: Rational,
    pub seed: u64,
    /// Overrides the default sample count of the suite.
    pub samples: Option<usize>,
    /// Restricts the suite to one group id.
    pub group: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { p: 5, cap: 12, trunc: Rational::from(12), seed: 0, samples: None, group: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub pass: bool,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub anchor: String,
    pub params: String,
    pub checks: Vec<Check>,
    /// Recorded measurements that carry no verdict.
    pub data: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Tsv,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_status(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        match format {
            ReportFormat::Text => {
                let _ = writeln!(out, "suite {} ({})", self.suite, self.params);
                let _ = writeln!(out, "anchor: {}", self.anchor);
                for c in &self.checks {
                    let v = if c.pass { "PASS" } else { "FAIL" };
                    let _ = writeln!(out, "[{v}] {}: {} -- {}", c.id, c.anchor, c.witness);
                }
                for d in &self.data {
                    let _ = writeln!(out, "data: {d}");
                }
                let _ = writeln!(out, "status {}", self.exit_status());
            }
            ReportFormat::Tsv => {
                let _ = writeln!(out, "suite\tcheck\tverdict\tanchor\twitness");
                for c in &self.checks {
                    let v = if c.pass { "pass" } else { "fail" };
                    let _ = writeln!(out, "{}\t{}\t{v}\t{}\t{}", self.suite, c.id, c.anchor, c.witness);
                }
                for d in &self.data {
                    let _ = writeln!(out, "{}\tdata\t-\t-\t{d}", self.suite);
                }
            }
        }
        out
    }
}

/// Accumulates the checks of one suite.
pub(crate) struct Builder {
    checks: Vec<Check>,
    data: Vec<String>,
}

impl Builder {
    fn new() -> Self {
        Builder { checks: Vec::new(), data: Vec::new() }
    }

    pub(crate) fn check(&mut self, id: impl Into<String>, anchor: &str, pass: bool, witness: impl Into<String>) {
        self.checks.push(Check { id: id.into(), anchor: anchor.to_string(), pass, witness: witness.into() });
    }

    pub(crate) fn data(&mut self, line: impl Into<String>) {
        self.data.push(line.into());
    }
}

pub fn run_suite(id: &str, cfg: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
    let anchor = SUITES
        .iter()
        .find(|(s, _)| *s == id)
        .map(|(_, a)| a.to_string())
        .ok_or_else(|| VerifyError::UnknownSuite(id.to_string()))?;
    let mut b = Builder::new();
    suites::dispatch(id, cfg, &mut b)?;
    b.checks.sort_by(|x, y| x.id.cmp(&y.id));
    let group = cfg.group.as_deref().unwrap_or("default");
    let samples = cfg.samples.map_or("default".to_string(), |s| s.to_string());
    let params = format!(
        "seed={} p={} N={} T={} group={group} samples={samples}",
        cfg.seed, cfg.p, cfg.cap, cfg.trunc
    );
    Ok(SuiteReport { suite: id.to_string(), anchor, params, checks: b.checks, data: b.data })
}
