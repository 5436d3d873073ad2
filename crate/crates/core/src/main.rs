//! Command-line front end: scenario evaluation, parameter sweeps, scheme
//! comparison, simulator cross-validation, and state-space dumps.
//!
//! Exit codes: 0 success, 2 scenario parse error, 3 invalid parameters,
//! 4 solver non-convergence, 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use bandalloc::error::Error;
use bandalloc::scenario::{Scenario, SolverChoice};
use bandalloc::sweep::{
    compare_schemes, evaluate, fmt_sig, run_sweep, sweep_csv, validate_against_sim, EvalOutcome,
    SweepSpec, SweepVariable,
};
use bandalloc::Scheme;

const EXIT_PARSE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_NOT_CONVERGED: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "bandalloc",
    version,
    about = "Blocking analysis of D2D / cellular / Wi-Fi band sharing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file (`key = value` lines; see scenarios/default.cfg).
    #[arg(long)]
    scenario: PathBuf,
    /// Override the scenario's solver.
    #[arg(long, value_parser = solver_arg)]
    solver: Option<SolverChoice>,
    /// Override the iterative solver tolerance.
    #[arg(long)]
    alpha: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Swept variable: lambda_total, rho, or theta_u.
    #[arg(long = "var", value_parser = variable_arg)]
    variable: SweepVariable,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    step: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one scenario point and print the blocking triple.
    Eval {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Override the scenario's scheme.
        #[arg(long, value_parser = scheme_arg)]
        scheme: Option<Scheme>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Sweep one variable over a grid and emit CSV (or JSON) rows.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Scheme to sweep (repeatable, comma-separable); defaults to the
        /// scenario's scheme.
        #[arg(long = "scheme", value_parser = scheme_arg, value_delimiter = ',')]
        schemes: Vec<Scheme>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compare proposed/overlay/underlay over a grid (JSON report).
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Cross-validate the solver against the discrete-event simulator.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Override the scenario's scheme.
        #[arg(long, value_parser = scheme_arg)]
        scheme: Option<Scheme>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        warmup: Option<f64>,
        #[arg(long)]
        reps: Option<u32>,
    },
    /// Print the reachable state space, one `i,j,m,n` per line.
    DumpStates {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Override the scenario's scheme.
        #[arg(long, value_parser = scheme_arg)]
        scheme: Option<Scheme>,
    },
}

fn scheme_arg(s: &str) -> Result<Scheme, String> {
    Scheme::from_str(s)
}

fn solver_arg(s: &str) -> Result<SolverChoice, String> {
    SolverChoice::from_str(s)
}

fn variable_arg(s: &str) -> Result<SweepVariable, String> {
    SweepVariable::from_str(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::ScenarioParse { .. } | Error::ScenarioIncomplete(_) => EXIT_PARSE,
        Error::InvalidParameter { .. }
        | Error::UnboundedStateSpace(_)
        | Error::InvalidTolerance(_)
        | Error::InvalidSimConfig(_) => EXIT_INVALID,
        Error::SingularSystem | Error::Io(_) => 1,
    }
}

fn load_scenario(args: &ScenarioArgs, scheme: Option<Scheme>) -> Result<Scenario, Error> {
    let mut scenario = Scenario::load(&args.scenario)?;
    if let Some(scheme) = scheme {
        scenario.scheme = scheme;
    }
    if let Some(solver) = args.solver {
        scenario.solver = solver;
    }
    if let Some(alpha) = args.alpha {
        scenario.alpha = alpha;
    }
    scenario.validate()?;
    Ok(scenario)
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Eval {
            scenario,
            scheme,
            format,
        } => {
            let sc = load_scenario(&scenario, scheme)?;
            let outcome = evaluate(&sc.params, sc.scheme, sc.solver, sc.alpha, sc.max_iter)?;
            let rendered = match format {
                Format::Json => serde_json::to_string_pretty(&outcome)
                    .expect("eval outcome serializes")
                    + "\n",
                Format::Text | Format::Csv => render_eval_text(&outcome),
            };
            emit(scenario.out.as_deref(), &rendered)?;
            if outcome.converged {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!(
                    "warning: solver did not converge within {} iterations",
                    sc.max_iter
                );
                Ok(ExitCode::from(EXIT_NOT_CONVERGED))
            }
        }
        Command::Sweep {
            scenario,
            grid,
            schemes,
            format,
        } => {
            let sc = load_scenario(&scenario, None)?;
            let spec = SweepSpec {
                variable: grid.variable,
                start: grid.from,
                stop: grid.to,
                step: grid.step,
                schemes: if schemes.is_empty() {
                    vec![sc.scheme]
                } else {
                    schemes
                },
            };
            let rows = run_sweep(&sc, &spec)?;
            let rendered = match format {
                Format::Json => {
                    serde_json::to_string_pretty(&rows).expect("sweep rows serialize") + "\n"
                }
                Format::Text | Format::Csv => sweep_csv(&rows),
            };
            emit(scenario.out.as_deref(), &rendered)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { scenario, grid } => {
            let sc = load_scenario(&scenario, None)?;
            let spec = SweepSpec {
                variable: grid.variable,
                start: grid.from,
                stop: grid.to,
                step: grid.step,
                schemes: Scheme::ALL.to_vec(),
            };
            let report = compare_schemes(&sc, &spec)?;
            let rendered =
                serde_json::to_string_pretty(&report).expect("compare report serializes") + "\n";
            emit(scenario.out.as_deref(), &rendered)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            scenario,
            scheme,
            seed,
            horizon,
            warmup,
            reps,
        } => {
            let sc = load_scenario(&scenario, scheme)?;
            let mut sim = sc.sim_config();
            if let Some(seed) = seed {
                sim.seed = seed;
            }
            if let Some(horizon) = horizon {
                sim.horizon = horizon;
            }
            if let Some(warmup) = warmup {
                sim.warmup = warmup;
            }
            if let Some(reps) = reps {
                sim.replications = reps;
            }
            let report = validate_against_sim(&sc, &sim)?;
            let rendered =
                serde_json::to_string_pretty(&report).expect("validate report serializes") + "\n";
            emit(scenario.out.as_deref(), &rendered)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::DumpStates { scenario, scheme } => {
            let sc = load_scenario(&scenario, scheme)?;
            let space = bandalloc::StateSpace::enumerate(&sc.params, sc.scheme)?;
            emit(scenario.out.as_deref(), &space.dump())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn render_eval_text(outcome: &EvalOutcome) -> String {
    format!(
        "scheme        {}\n\
         solver        {}\n\
         states        {}\n\
         iterations    {}\n\
         converged     {}\n\
         residual      {}\n\
         p_block_d2d   {}\n\
         p_block_cc    {}\n\
         p_block_wifi  {}\n",
        outcome.scheme,
        outcome.solver.name(),
        outcome.states,
        outcome.iterations,
        outcome.converged,
        fmt_sig(outcome.residual),
        fmt_sig(outcome.report.p_block_d2d),
        fmt_sig(outcome.report.p_block_cc),
        fmt_sig(outcome.report.p_block_wifi),
    )
}
