//! Experiment harness: single-point evaluation, parameter sweeps, scheme
//! comparison, and solver-versus-simulator validation, with CSV and JSON
//! rendering that is byte-identical across runs.

use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::model::{Scheme, SystemParams, TrafficClass};
use crate::scenario::{Scenario, SolverChoice};
use crate::sim::{simulate, SimConfig};
use crate::solver::{blocking_probabilities, solve_exact, solve_iterative, BlockingReport};
use crate::space::StateSpace;

/// Formats a float with 12 significant digits, the fixed precision of all
/// numeric report fields.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.11e}")
}

/// Result of evaluating one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct EvalOutcome {
    pub scheme: Scheme,
    pub solver: SolverChoice,
    pub states: usize,
    pub iterations: u64,
    pub converged: bool,
    pub residual: f64,
    #[serde(flatten)]
    pub report: BlockingReport,
}

/// Enumerates the state space for `(params, scheme)` and computes the
/// blocking triple with the chosen solver.
pub fn evaluate(
    params: &SystemParams,
    scheme: Scheme,
    solver: SolverChoice,
    alpha: f64,
    max_iter: u64,
) -> Result<EvalOutcome, Error> {
    let space = StateSpace::enumerate(params, scheme)?;
    let dist = match solver {
        SolverChoice::Iterative => solve_iterative(&space, params, scheme, alpha, max_iter)?,
        SolverChoice::Exact => solve_exact(&space, params, scheme)?,
    };
    let report = blocking_probabilities(&dist, &space, params, scheme);
    Ok(EvalOutcome {
        scheme,
        solver,
        states: space.len(),
        iterations: dist.iterations,
        converged: dist.converged,
        residual: dist.residual,
        report,
    })
}

/// The swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    LambdaTotal,
    Rho,
    ThetaU,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::LambdaTotal => "lambda_total",
            SweepVariable::Rho => "rho",
            SweepVariable::ThetaU => "theta_u",
        }
    }

    fn apply(self, params: &mut SystemParams, value: f64) {
        match self {
            SweepVariable::LambdaTotal => params.lambda_total = value,
            SweepVariable::Rho => params.rho = value,
            SweepVariable::ThetaU => params.theta_u = value,
        }
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lambda_total" => Ok(SweepVariable::LambdaTotal),
            "rho" => Ok(SweepVariable::Rho),
            "theta_u" => Ok(SweepVariable::ThetaU),
            other => Err(format!(
                "unknown sweep variable `{other}` (expected lambda_total, rho, or theta_u)"
            )),
        }
    }
}

/// Grid and scheme list for a sweep.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub schemes: Vec<Scheme>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |message: String| Error::InvalidParameter {
            key: self.variable.name().to_string(),
            message,
        };
        if !self.start.is_finite() || !self.stop.is_finite() || !self.step.is_finite() {
            return Err(bad("sweep bounds must be finite".to_string()));
        }
        if self.start > self.stop {
            return Err(bad(format!(
                "start {} exceeds stop {}",
                self.start, self.stop
            )));
        }
        if !(self.step > 0.0) {
            return Err(bad(format!("step must be > 0, got {}", self.step)));
        }
        if self.variable == SweepVariable::Rho && (self.start < 0.0 || self.stop > 1.0) {
            return Err(bad(format!(
                "rho sweep must stay within [0, 1], got [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.schemes.is_empty() {
            return Err(bad("no schemes requested".to_string()));
        }
        Ok(())
    }

    /// Ascending grid `start, start+step, ...` up to and including `stop`
    /// (within half a step of floating-point slack).
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 0.5).floor() as usize;
        (0..=count)
            .map(|k| self.start + self.step * k as f64)
            .filter(|v| *v <= self.stop + self.step * 1e-9)
            .collect()
    }
}

/// One sweep point for one scheme.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub variable: SweepVariable,
    pub value: f64,
    pub p_block_d2d: f64,
    pub p_block_cc: f64,
    pub p_block_wifi: f64,
    pub states: usize,
    pub iterations: u64,
    pub residual: f64,
    /// `ok`, or `failed` when this point could not be evaluated; failed
    /// points carry NaN metrics and do not abort the sweep.
    pub status: String,
}

/// Evaluates every grid point for every requested scheme. Rows are ordered
/// scheme-major, ascending in the swept value; each point is a fresh
/// evaluation with no state carried between points.
pub fn run_sweep(scenario: &Scenario, spec: &SweepSpec) -> Result<Vec<SweepRow>, Error> {
    scenario.validate()?;
    spec.validate()?;
    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        for value in spec.values() {
            let mut params = scenario.params;
            spec.variable.apply(&mut params, value);
            let outcome = params.validate().and_then(|()| {
                evaluate(&params, scheme, scenario.solver, scenario.alpha, scenario.max_iter)
            });
            rows.push(match outcome {
                Ok(out) => SweepRow {
                    scheme,
                    variable: spec.variable,
                    value,
                    p_block_d2d: out.report.p_block_d2d,
                    p_block_cc: out.report.p_block_cc,
                    p_block_wifi: out.report.p_block_wifi,
                    states: out.states,
                    iterations: out.iterations,
                    residual: out.residual,
                    status: "ok".to_string(),
                },
                Err(_) => SweepRow {
                    scheme,
                    variable: spec.variable,
                    value,
                    p_block_d2d: f64::NAN,
                    p_block_cc: f64::NAN,
                    p_block_wifi: f64::NAN,
                    states: 0,
                    iterations: 0,
                    residual: f64::NAN,
                    status: "failed".to_string(),
                },
            });
        }
    }
    Ok(rows)
}

/// CSV rendering with a versioned schema comment line.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str("# bandalloc-sweep-v1\n");
    out.push_str(
        "scheme,variable,value,p_block_d2d,p_block_cc,p_block_wifi,states,iterations,residual,status\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.scheme,
            r.variable.name(),
            fmt_sig(r.value),
            fmt_sig(r.p_block_d2d),
            fmt_sig(r.p_block_cc),
            fmt_sig(r.p_block_wifi),
            r.states,
            r.iterations,
            fmt_sig(r.residual),
            r.status
        ));
    }
    out
}

const REL_DIFF_EPSILON: f64 = 1e-12;

/// Signed relative difference `(a - b) / max(a, epsilon)`.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    (a - b) / a.max(REL_DIFF_EPSILON)
}

/// Blocking triples of two schemes compared per class.
#[derive(Debug, Clone, Serialize)]
pub struct RelativeDifference {
    pub class: &'static str,
    pub minuend: Scheme,
    pub subtrahend: Scheme,
    pub value: f64,
}

/// One grid point of a scheme comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ComparePoint {
    pub value: f64,
    pub proposed: Option<BlockingReport>,
    pub overlay: Option<BlockingReport>,
    pub underlay: Option<BlockingReport>,
    pub relative_differences: Vec<RelativeDifference>,
}

/// Bracketing grid pair where a scheme's D2D and Wi-Fi blocking curves cross.
#[derive(Debug, Clone, Serialize)]
pub struct Crossing {
    pub scheme: Scheme,
    pub lower: f64,
    pub upper: f64,
}

/// Scheme comparison over a sweep grid.
#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub schema: &'static str,
    pub variable: SweepVariable,
    pub points: Vec<ComparePoint>,
    /// Sign changes of `p_block_d2d - p_block_wifi` along the grid, reported
    /// for threshold sweeps where the two curves trade places.
    pub crossings: Vec<Crossing>,
}

/// Evaluates all three schemes per grid point and reports pairwise relative
/// differences plus D2D/Wi-Fi crossing brackets (threshold sweeps only).
pub fn compare_schemes(scenario: &Scenario, spec: &SweepSpec) -> Result<CompareReport, Error> {
    scenario.validate()?;
    let spec = SweepSpec {
        schemes: Scheme::ALL.to_vec(),
        ..spec.clone()
    };
    spec.validate()?;

    let mut points = Vec::new();
    for value in spec.values() {
        let mut triples: [Option<BlockingReport>; 3] = [None, None, None];
        for (slot, scheme) in Scheme::ALL.iter().enumerate() {
            let mut params = scenario.params;
            spec.variable.apply(&mut params, value);
            if params.validate().is_ok() {
                if let Ok(out) = evaluate(
                    &params,
                    *scheme,
                    scenario.solver,
                    scenario.alpha,
                    scenario.max_iter,
                ) {
                    triples[slot] = Some(out.report);
                }
            }
        }
        let mut relative_differences = Vec::new();
        let pairs = [
            (Scheme::Proposed, Scheme::Overlay),
            (Scheme::Proposed, Scheme::Underlay),
            (Scheme::Underlay, Scheme::Overlay),
        ];
        for (a, b) in pairs {
            let (Some(ra), Some(rb)) = (triples[a as usize], triples[b as usize]) else {
                continue;
            };
            for class in TrafficClass::ALL {
                relative_differences.push(RelativeDifference {
                    class: class.name(),
                    minuend: a,
                    subtrahend: b,
                    value: relative_difference(ra.get(class), rb.get(class)),
                });
            }
        }
        points.push(ComparePoint {
            value,
            proposed: triples[0],
            overlay: triples[1],
            underlay: triples[2],
            relative_differences,
        });
    }

    let mut crossings = Vec::new();
    if spec.variable == SweepVariable::ThetaU {
        for scheme in Scheme::ALL {
            let series: Vec<(f64, f64)> = points
                .iter()
                .filter_map(|pt| {
                    let r = match scheme {
                        Scheme::Proposed => pt.proposed,
                        Scheme::Overlay => pt.overlay,
                        Scheme::Underlay => pt.underlay,
                    }?;
                    Some((pt.value, r.p_block_d2d - r.p_block_wifi))
                })
                .collect();
            for w in series.windows(2) {
                if w[0].1 != 0.0 && w[1].1 != 0.0 && (w[0].1 > 0.0) != (w[1].1 > 0.0) {
                    crossings.push(Crossing {
                        scheme,
                        lower: w[0].0,
                        upper: w[1].0,
                    });
                }
            }
        }
    }

    Ok(CompareReport {
        schema: "bandalloc-compare-v1",
        variable: spec.variable,
        points,
        crossings,
    })
}

/// Per-class row of a validation report.
#[derive(Debug, Clone, Serialize)]
pub struct ClassValidation {
    pub class: &'static str,
    pub analytic: f64,
    pub simulated: f64,
    pub ci_half_width: f64,
    /// Simulated estimate within three confidence half-widths of the
    /// analytic value.
    pub pass: bool,
}

/// Solver-versus-simulator validation report.
#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub schema: &'static str,
    pub scheme: Scheme,
    pub states: usize,
    pub seed: u64,
    pub horizon: f64,
    pub warmup: f64,
    pub replications: u32,
    pub classes: Vec<ClassValidation>,
    pub pass: bool,
}

/// Runs the analytic solver and the simulator on identical parameters and
/// checks the three-half-width agreement criterion per class.
pub fn validate_against_sim(scenario: &Scenario, sim: &SimConfig) -> Result<ValidateReport, Error> {
    scenario.validate()?;
    let analytic = evaluate(
        &sim.params,
        sim.scheme,
        scenario.solver,
        scenario.alpha,
        scenario.max_iter,
    )?;
    let stats = simulate(sim)?;
    let mut classes = Vec::new();
    let mut all_pass = true;
    for class in TrafficClass::ALL {
        let analytic_value = analytic.report.get(class);
        let s = stats.class(class);
        let pass = (s.estimate - analytic_value).abs() <= 3.0 * s.half_width;
        all_pass &= pass;
        classes.push(ClassValidation {
            class: class.name(),
            analytic: analytic_value,
            simulated: s.estimate,
            ci_half_width: s.half_width,
            pass,
        });
    }
    Ok(ValidateReport {
        schema: "bandalloc-validate-v1",
        scheme: sim.scheme,
        states: analytic.states,
        seed: sim.seed,
        horizon: sim.horizon,
        warmup: sim.warmup,
        replications: sim.replications,
        classes,
        pass: all_pass,
    })
}
