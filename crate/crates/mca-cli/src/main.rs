//! `mca-solve`: series-form ODE integration, split-form integration,
//! piecewise-linear closed-form solutions, oracle comparison, and
//! trailing-coefficient uniformity testing, from one deterministic binary.
//!
//! Exit codes: 0 success, 2 configuration rejected (the message names the
//! offending field), 3 the run itself failed (non-finite state or an
//! out-of-band lattice slope).

mod config;
mod output;

use std::io::{BufWriter, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mca_core::integrator::{
    extract_random_part, integrate_full_with_stride, integrate_split, Trajectory,
};
use mca_core::linear_approx::build;
use mca_core::reference::{compare, euler};
use mca_core::stats::{chi_square_uniform, ks_uniform};
use mca_core::systems::PolySystem;
use mca_core::tau_series::ShiftFunction;
use mca_core::Error;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use config::{resolve_system, steps_for_horizon, validate, ConfigError, RunConfig};
use output::RandomnessSummary;

const CHI_SQUARE_BINS: usize = 16;

#[derive(Parser)]
#[command(
    name = "mca-solve",
    version,
    about = "Series-form integration of polynomial ODE systems with digit-shifting state arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate with the full per-power series representation
    Integrate(RunArgs),
    /// Integrate with the two-block (regular + trailing) representation
    IntegrateSplit(RunArgs),
    /// Emit the piecewise-linear closed-form solution
    Linear(RunArgs),
    /// Integrate and report the deviation from the plain stepped scheme
    Compare(RunArgs),
    /// Extract a trailing coefficient sequence and test its uniformity
    Randomness(RandomnessArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Builtin system (example1, vanderpol, lorenz) or inline JSON
    /// {"dim":N,"equations":[[{"c":...,"e":[...]}],...],"names":[...]}
    #[arg(long)]
    system: String,

    /// Lorenz coupling strength
    #[arg(long)]
    sigma: Option<f64>,

    /// Lorenz drive parameter
    #[arg(long)]
    r: Option<f64>,

    /// Lorenz damping parameter
    #[arg(long)]
    v: Option<f64>,

    /// Oscillator nonlinearity strength
    #[arg(long)]
    lambda: Option<f64>,

    /// Start vector, comma separated (default: the system's standard start)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y0: Option<Vec<f64>>,

    /// Step of the independent variable, in (0, 1)
    #[arg(long, default_value_t = 0.0009765625)]
    tau: f64,

    /// Horizon; the run takes floor(t_max/tau) whole steps
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,

    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    output: OutputFormat,

    /// Keep every k-th digit snapshot (default: every step up to 10^4
    /// steps, then thinned)
    #[arg(long, env = "MCA_SNAPSHOT_STRIDE")]
    snapshot_stride: Option<usize>,
}

#[derive(Args)]
struct RandomnessArgs {
    #[command(flatten)]
    run: RunArgs,

    /// Trailing coefficient index to extract, in (1, p] (default: p)
    #[arg(long)]
    coeff_index: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Table,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Table => "table",
        }
    }
}

struct AppError {
    code: i32,
    message: String,
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError {
            code: 2,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError {
            code: 1,
            message: format!("output failed: {e}"),
        }
    }
}

/// Failures of the run itself (as opposed to its configuration).
fn run_error(e: Error, tau: f64) -> AppError {
    match e {
        Error::NonFinite { step } => AppError {
            code: 3,
            message: format!(
                "run aborted: state became non-finite at step {step} (t = {})",
                step as f64 * tau
            ),
        },
        Error::SlopeTooLarge {
            component,
            slope,
            limit,
            t,
        } => AppError {
            code: 3,
            message: format!(
                "linear build aborted at t = {t}: component {component} has lattice slope {slope}, beyond the ±{limit} band for this tau"
            ),
        },
        other => AppError {
            code: 2,
            message: format!("invalid configuration: {other}"),
        },
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{}", e.message);
            std::process::exit(e.code);
        }
    }
}

/// A validated, ready-to-run invocation.
struct Prepared {
    sys: PolySystem,
    config: RunConfig,
    n_steps: usize,
}

fn prepare(args: &RunArgs, mode: &str, coeff_index: Option<usize>) -> Result<Prepared, AppError> {
    let (sys, params) = resolve_system(&args.system, args.sigma, args.r, args.v, args.lambda)?;
    let y0 = validate(&sys, args.y0.clone(), args.tau, args.t_max, mode == "linear")?;
    if args.snapshot_stride == Some(0) {
        return Err(ConfigError {
            field: "snapshot-stride",
            message: "must be at least 1".to_string(),
        }
        .into());
    }
    let n_steps = steps_for_horizon(args.t_max, args.tau);
    let config = RunConfig {
        mode: mode.to_string(),
        system: sys.id().to_string(),
        params,
        y0,
        tau: args.tau,
        t_max: args.t_max,
        output: args.output.name().to_string(),
        snapshot_stride: args.snapshot_stride,
        coeff_index,
    };
    Ok(Prepared {
        sys,
        config,
        n_steps,
    })
}

fn emit_json(w: &mut impl Write, value: serde_json::Value) -> Result<(), AppError> {
    serde_json::to_writer_pretty(&mut *w, &value).map_err(|e| AppError {
        code: 1,
        message: format!("output failed: {e}"),
    })?;
    writeln!(w)?;
    Ok(())
}

fn emit_trajectory(args: &RunArgs, prep: &Prepared, traj: &Trajectory) -> Result<(), AppError> {
    let stdout = std::io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    let names: Vec<String> = prep.sys.names().to_vec();
    match args.output {
        OutputFormat::Csv => output::write_trajectory_csv(&mut w, &names, traj)?,
        OutputFormat::Table => output::write_trajectory_table(&mut w, &names, traj)?,
        OutputFormat::Json => emit_json(&mut w, output::trajectory_json(&prep.config, &names, traj))?,
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Integrate(args) => {
            let prep = prepare(&args, "integrate", None)?;
            let shift = ShiftFunction::mod_carry(args.tau);
            let traj = integrate_full_with_stride(
                &prep.sys,
                &prep.config.y0,
                args.tau,
                prep.n_steps,
                &shift,
                args.snapshot_stride,
            )
            .map_err(|e| run_error(e, args.tau))?;
            emit_trajectory(&args, &prep, &traj)
        }
        Command::IntegrateSplit(args) => {
            let prep = prepare(&args, "integrate-split", None)?;
            let shift = ShiftFunction::mod_carry(args.tau);
            let traj = integrate_split(&prep.sys, &prep.config.y0, args.tau, prep.n_steps, &shift)
                .map_err(|e| run_error(e, args.tau))?;
            emit_trajectory(&args, &prep, &traj)
        }
        Command::Linear(args) => {
            let prep = prepare(&args, "linear", None)?;
            let sol = build(&prep.sys, &prep.config.y0, args.tau, args.t_max)
                .map_err(|e| run_error(e, args.tau))?;
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let names: Vec<String> = prep.sys.names().to_vec();
            match args.output {
                OutputFormat::Csv => output::write_segments_csv(&mut w, &names, &sol)?,
                OutputFormat::Table => output::write_segments_table(&mut w, &names, &sol)?,
                OutputFormat::Json => emit_json(&mut w, output::segments_json(&prep.config, &names, &sol))?,
            }
            w.flush()?;
            Ok(())
        }
        Command::Compare(args) => {
            let prep = prepare(&args, "compare", None)?;
            let shift = ShiftFunction::mod_carry(args.tau);
            let series = integrate_full_with_stride(
                &prep.sys,
                &prep.config.y0,
                args.tau,
                prep.n_steps,
                &shift,
                args.snapshot_stride,
            )
            .map_err(|e| run_error(e, args.tau))?;
            let oracle = euler(&prep.sys, &prep.config.y0, args.tau, prep.n_steps)
                .map_err(|e| run_error(e, args.tau))?;
            let report = compare(&series, &oracle).map_err(|e| run_error(e, args.tau))?;
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            match args.output {
                OutputFormat::Csv => output::write_report_csv(&mut w, &report)?,
                OutputFormat::Table => output::write_report_table(&mut w, &report)?,
                OutputFormat::Json => emit_json(&mut w, output::report_json(&prep.config, &report))?,
            }
            w.flush()?;
            Ok(())
        }
        Command::Randomness(rargs) => {
            let args = &rargs.run;
            let mut prep = prepare(args, "randomness", None)?;
            let p_index = prep.sys.retained_terms(1).map_err(|e| run_error(e, args.tau))?;
            let coeff_index = rargs.coeff_index.unwrap_or(p_index);
            prep.config.coeff_index = Some(coeff_index);
            let shift = ShiftFunction::mod_carry(args.tau);
            let traj = integrate_full_with_stride(
                &prep.sys,
                &prep.config.y0,
                args.tau,
                prep.n_steps,
                &shift,
                args.snapshot_stride,
            )
            .map_err(|e| run_error(e, args.tau))?;
            let samples = match extract_random_part(&traj, coeff_index) {
                Ok(samples) => samples,
                Err(Error::InvalidCoeffIndex { index, q, p }) => {
                    return Err(ConfigError {
                        field: "coeff-index",
                        message: format!("{index} is outside ({q}, {p}] for this system"),
                    }
                    .into())
                }
                Err(e) => return Err(run_error(e, args.tau)),
            };
            let chi_square = chi_square_uniform(&samples, CHI_SQUARE_BINS);
            let ks_distance = ks_uniform(&samples);
            let dist = ChiSquared::new((CHI_SQUARE_BINS - 1) as f64).expect("static dof");
            let summary = RandomnessSummary {
                samples: samples.len(),
                coeff_index,
                bins: CHI_SQUARE_BINS,
                chi_square,
                chi_square_p_value: 1.0 - dist.cdf(chi_square),
                ks_distance,
                degenerate: samples.windows(2).all(|w| w[0] == w[1]),
            };
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            match args.output {
                OutputFormat::Csv => {
                    output::write_samples_csv(&mut w, &samples)?;
                    let stderr = std::io::stderr();
                    let mut diag = stderr.lock();
                    output::write_summary_table(&mut diag, &summary)?;
                }
                OutputFormat::Table => output::write_summary_table(&mut w, &summary)?,
                OutputFormat::Json => {
                    emit_json(&mut w, output::randomness_json(&prep.config, &summary, &samples))?
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}
