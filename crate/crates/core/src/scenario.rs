//! Scenario files: plain-text `key = value` configuration.
//!
//! A scenario names every model parameter plus the scheme, and may carry
//! solver and simulator settings. `#` starts a comment, blank lines are
//! skipped, unknown and duplicate keys are rejected with the line number.

use std::collections::HashSet;
use std::path::Path;
use std::str::FromStr;

use crate::error::Error;
use crate::model::{Scheme, SystemParams};
use crate::sim::SimConfig;

/// Which stationary solver an evaluation should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Iterative,
    Exact,
}

impl SolverChoice {
    pub fn name(self) -> &'static str {
        match self {
            SolverChoice::Iterative => "iterative",
            SolverChoice::Exact => "exact",
        }
    }
}

impl FromStr for SolverChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "iterative" => Ok(SolverChoice::Iterative),
            "exact" => Ok(SolverChoice::Exact),
            other => Err(format!("unknown solver `{other}` (expected iterative or exact)")),
        }
    }
}

/// A parsed scenario: model parameters plus run settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Scenario {
    pub params: SystemParams,
    pub scheme: Scheme,
    pub solver: SolverChoice,
    /// Convergence tolerance of the iterative solver.
    pub alpha: f64,
    pub max_iter: u64,
    pub seed: u64,
    pub horizon: f64,
    /// Simulated time discarded before statistics; defaults to 1% of the
    /// horizon when the key is absent.
    pub warmup: f64,
    pub replications: u32,
}

impl Scenario {
    /// Run settings paired with defaults; parameters from [`SystemParams::default`].
    pub fn defaults() -> Scenario {
        Scenario {
            params: SystemParams::default(),
            scheme: Scheme::Proposed,
            solver: SolverChoice::Iterative,
            alpha: 1e-6,
            max_iter: 100_000,
            seed: 42,
            horizon: 1e5,
            warmup: 1e3,
            replications: 10,
        }
    }

    pub fn load(path: &Path) -> Result<Scenario, Error> {
        let text = std::fs::read_to_string(path)?;
        Scenario::parse_str(&text)
    }

    /// Parses scenario text. Syntax and schema problems surface as
    /// [`Error::ScenarioParse`] with a one-based line number; domain
    /// violations are reported separately by [`Scenario::validate`].
    pub fn parse_str(text: &str) -> Result<Scenario, Error> {
        let mut params = SystemParams::default();
        let mut scheme = None;
        let mut solver = SolverChoice::Iterative;
        let mut alpha = 1e-6;
        let mut max_iter = 100_000u64;
        let mut seed = 42u64;
        let mut horizon = 1e5;
        let mut warmup: Option<f64> = None;
        let mut replications = 10u32;

        let mut seen: HashSet<String> = HashSet::new();
        let mut have_params: HashSet<&'static str> = HashSet::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::ScenarioParse {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(Error::ScenarioParse {
                    line,
                    message: "empty key or value".to_string(),
                });
            }
            if !seen.insert(key.to_string()) {
                return Err(Error::ScenarioParse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }

            let bad_number = |kind: &str| Error::ScenarioParse {
                line,
                message: format!("key `{key}`: expected {kind}, got `{value}`"),
            };
            let parse_f64 = || value.parse::<f64>().map_err(|_| bad_number("a number"));
            match key {
                "lambda_total" => params.lambda_total = parse_f64()?,
                "rho" => params.rho = parse_f64()?,
                "lambda_wifi" => params.lambda_wifi = parse_f64()?,
                "mu" => params.mu = parse_f64()?,
                "r_l_dd" => params.r_l_dd = parse_f64()?,
                "r_up_cc" => params.r_up_cc = parse_f64()?,
                "r_dw_cc" => params.r_dw_cc = parse_f64()?,
                "r_u_dd" => params.r_u_dd = parse_f64()?,
                "r_u_wf" => params.r_u_wf = parse_f64()?,
                "cap_dd" => params.cap_dd = parse_f64()?,
                "cap_up" => params.cap_up = parse_f64()?,
                "cap_dw" => params.cap_dw = parse_f64()?,
                "cap_u" => params.cap_u = parse_f64()?,
                "theta_u" => params.theta_u = parse_f64()?,
                "theta_l" => params.theta_l = parse_f64()?,
                "scheme" => {
                    scheme = Some(Scheme::from_str(value).map_err(|message| {
                        Error::ScenarioParse { line, message }
                    })?)
                }
                "solver" => {
                    solver = SolverChoice::from_str(value)
                        .map_err(|message| Error::ScenarioParse { line, message })?
                }
                "alpha" => alpha = parse_f64()?,
                "max_iter" => {
                    max_iter = value
                        .parse::<u64>()
                        .map_err(|_| bad_number("a non-negative integer"))?
                }
                "seed" => {
                    seed = value
                        .parse::<u64>()
                        .map_err(|_| bad_number("a non-negative integer"))?
                }
                "horizon" => horizon = parse_f64()?,
                "warmup" => warmup = Some(parse_f64()?),
                "replications" => {
                    replications = value
                        .parse::<u32>()
                        .map_err(|_| bad_number("a non-negative integer"))?
                }
                other => {
                    return Err(Error::ScenarioParse {
                        line,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
            if is_param_key(key) {
                have_params.insert(param_key(key));
            }
        }

        let missing: Vec<&str> = PARAM_KEYS
            .iter()
            .copied()
            .filter(|k| !have_params.contains(k))
            .collect();
        if !missing.is_empty() {
            return Err(Error::ScenarioIncomplete(format!(
                "missing keys: {}",
                missing.join(", ")
            )));
        }
        let Some(scheme) = scheme else {
            return Err(Error::ScenarioIncomplete("missing key: scheme".to_string()));
        };

        Ok(Scenario {
            params,
            scheme,
            solver,
            alpha,
            max_iter,
            seed,
            horizon,
            warmup: warmup.unwrap_or(horizon * 0.01),
            replications,
        })
    }

    /// Domain checks over parameters and run settings.
    pub fn validate(&self) -> Result<(), Error> {
        self.params.validate()?;
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter {
                key: "alpha".to_string(),
                message: format!("must be > 0, got {}", self.alpha),
            });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                key: "max_iter".to_string(),
                message: "must be at least 1".to_string(),
            });
        }
        if !(self.warmup >= 0.0) || !(self.horizon > self.warmup) {
            return Err(Error::InvalidParameter {
                key: "horizon".to_string(),
                message: format!(
                    "need horizon > warmup >= 0, got horizon {} warmup {}",
                    self.horizon, self.warmup
                ),
            });
        }
        if self.replications == 0 {
            return Err(Error::InvalidParameter {
                key: "replications".to_string(),
                message: "must be at least 1".to_string(),
            });
        }
        Ok(())
    }

    /// Simulator configuration drawn from this scenario.
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            params: self.params,
            scheme: self.scheme,
            seed: self.seed,
            horizon: self.horizon,
            warmup: self.warmup,
            replications: self.replications,
        }
    }
}

const PARAM_KEYS: [&str; 15] = [
    "lambda_total",
    "rho",
    "lambda_wifi",
    "mu",
    "r_l_dd",
    "r_up_cc",
    "r_dw_cc",
    "r_u_dd",
    "r_u_wf",
    "cap_dd",
    "cap_up",
    "cap_dw",
    "cap_u",
    "theta_u",
    "theta_l",
];

fn is_param_key(key: &str) -> bool {
    PARAM_KEYS.contains(&key)
}

fn param_key(key: &str) -> &'static str {
    PARAM_KEYS
        .iter()
        .copied()
        .find(|k| *k == key)
        .expect("checked by is_param_key")
}
