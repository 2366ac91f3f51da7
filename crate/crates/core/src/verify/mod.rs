//! Numerical verification suites: each check compares two independent
//! routes to the same quantity and records the residual against a
//! tolerance.

mod suites;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::catalog::{exponential_triplet, stable_triplet, StableSpec};
use crate::error::{LevyError, Result};
use crate::simulate::DEFAULT_SEED;
use crate::triplet::{Atom, LevyMeasure, LevyTriplet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Factorization,
    Commutativity,
    Prop3,
    Stable,
    Exponential,
    Limit,
    Corollary2,
    Montecarlo,
    Special,
    Timechange,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Factorization,
        Suite::Commutativity,
        Suite::Prop3,
        Suite::Stable,
        Suite::Exponential,
        Suite::Limit,
        Suite::Corollary2,
        Suite::Montecarlo,
        Suite::Special,
        Suite::Timechange,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Factorization => "factorization",
            Suite::Commutativity => "commutativity",
            Suite::Prop3 => "prop3",
            Suite::Stable => "stable",
            Suite::Exponential => "exponential",
            Suite::Limit => "limit",
            Suite::Corollary2 => "corollary2",
            Suite::Montecarlo => "montecarlo",
            Suite::Special => "special",
            Suite::Timechange => "timechange",
        }
    }

    /// Resolves a suite name; `all` expands to every suite.
    pub fn parse_selection(name: &str) -> Result<Vec<Suite>> {
        if name == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        name.parse().map(|s| vec![s])
    }
}

impl FromStr for Suite {
    type Err = LevyError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| LevyError::Parse(format!("unknown verify suite '{s}'")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Default tolerances per kind of check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Exponent identities computed by quadrature.
    pub identity: f64,
    /// Relative agreement of Lévy densities.
    pub density: f64,
    /// Closed forms against the generic pipeline.
    pub closed_form: f64,
    /// Relative agreement of shifts and variances.
    pub parameter: f64,
    /// Relative agreement of ∫ min(1, x²) M(dx).
    pub mass: f64,
    /// Sup distance between empirical and analytic characteristic functions.
    pub monte_carlo: f64,
    /// Largest admissible β = 1000 distance in the limit suite.
    pub limit: f64,
    /// Special-function identities.
    pub special: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-8,
            density: 1e-6,
            closed_form: 1e-6,
            parameter: 1e-10,
            mass: 1e-5,
            monte_carlo: 0.05,
            limit: 0.05,
            special: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tolerances: Tolerances,
    pub seed: u64,
    pub mc_samples: usize,
    pub mc_steps: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            seed: DEFAULT_SEED,
            mc_samples: 20_000,
            mc_steps: 512,
        }
    }
}

/// One measured residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn below(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual < tolerance,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// A check whose computation itself failed.
    pub fn errored(name: impl Into<String>, tolerance: f64, err: &LevyError) -> Self {
        Self {
            name: name.into(),
            residual: f64::NAN,
            tolerance,
            passed: false,
            note: Some(err.to_string()),
        }
    }

    fn from_result(name: String, tolerance: f64, r: Result<f64>) -> Self {
        match r {
            Ok(v) => Check::below(name, v, tolerance),
            Err(e) => Check::errored(name, tolerance, &e),
        }
    }

    pub fn line(&self) -> String {
        let mut s = format!(
            "{:<48} residual={:<12.4e} tol={:<9.1e} {}",
            self.name,
            self.residual,
            self.tolerance,
            if self.passed { "PASS" } else { "FAIL" }
        );
        if let Some(n) = &self.note {
            s.push_str("  # ");
            s.push_str(n);
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub elapsed_seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Largest residual-to-tolerance ratio; infinite when a check errored.
    pub fn worst_ratio(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| {
                if c.residual.is_finite() {
                    c.residual / c.tolerance
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn elapsed(&self) -> Duration {
        Duration::from_secs_f64(self.elapsed_seconds)
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let checks = match suite {
        Suite::Factorization => suites::factorization(opts),
        Suite::Commutativity => suites::commutativity(opts),
        Suite::Prop3 => suites::prop3(opts),
        Suite::Stable => suites::stable(opts),
        Suite::Exponential => suites::exponential(opts),
        Suite::Limit => suites::limit(opts),
        Suite::Corollary2 => suites::corollary2(opts),
        Suite::Montecarlo => suites::montecarlo(opts),
        Suite::Special => suites::special(opts),
        Suite::Timechange => suites::timechange(opts),
    };
    SuiteReport {
        suite,
        checks,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }
}

/// A named test driver.
#[derive(Debug, Clone)]
pub struct CorpusDriver {
    pub name: &'static str,
    pub triplet: LevyTriplet,
}

/// Shift, Gaussian, single atom, mixed, exponential and two stable laws.
pub fn corpus() -> Vec<CorpusDriver> {
    let t = |a, r, atoms: Vec<Atom>| {
        LevyTriplet::new(a, r, LevyMeasure::from_atoms(atoms).unwrap()).unwrap()
    };
    let stable = |p, cp, cm, a| stable_triplet(&StableSpec::new(p, cp, cm, a).unwrap()).unwrap();
    vec![
        CorpusDriver {
            name: "shift",
            triplet: t(1.3, 0.0, vec![]),
        },
        CorpusDriver {
            name: "gaussian",
            triplet: t(0.0, 1.0, vec![]),
        },
        CorpusDriver {
            name: "atom",
            triplet: t(0.0, 0.0, vec![Atom::new(1.5, 2.0)]),
        },
        CorpusDriver {
            name: "mixed",
            triplet: t(0.3, 0.7, vec![Atom::new(1.5, 2.0), Atom::new(-0.6, 1.0)]),
        },
        CorpusDriver {
            name: "exponential",
            triplet: exponential_triplet(1.0).unwrap(),
        },
        CorpusDriver {
            name: "stable0.5",
            triplet: stable(0.5, 1.0, 0.5, 0.2),
        },
        CorpusDriver {
            name: "stable1.5",
            triplet: stable(1.5, 0.6, 0.3, -0.1),
        },
    ]
}

/// 41 points on [−5, 5].
pub fn y_grid() -> Vec<f64> {
    (0..=40).map(|k| -5.0 + 0.25 * k as f64).collect()
}
