//! `homsense`: state QFI tables, Fisher sweeps, Wigner grids and delay
//! estimation for generalized Hong-Ou-Mandel interferometry.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use homsense_core::estimator::fi_optimal_tau;
use homsense_core::qfi::{phase_space_moments, TablePreset};
use homsense_core::{BiphotonState, Convention, DetectionModel, HomModel, PhaseMatchingSpec, SearchWindow, TrialCounts, Which};

use config::{parse_counts, Format, Interval, Method, Range, RunConfig, SweepAxis, Task};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<homsense_core::Error> for CliError {
    fn from(e: homsense_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "homsense", version, about = "Time-frequency metrology with generalized Hong-Ou-Mandel interferometry")]
struct Cli {
    /// JSON state specification.
    #[arg(long, global = true)]
    state: Option<PathBuf>,
    /// Detector loss γ in [0, 1).
    #[arg(long, global = true, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write here (atomically) instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, global = true, default_value = "printed", value_parser = parse_convention)]
    convention: Convention,
    #[command(subcommand)]
    command: Command,
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse().map_err(|e: homsense_core::Error| e.to_string())
}

fn parse_preset(s: &str) -> Result<TablePreset, String> {
    s.parse().map_err(|e: homsense_core::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum WhichArg {
    Tau,
    Mu,
    Joint,
}

#[derive(Debug, Args)]
struct WindowArgs {
    /// Delay search interval `lo:hi` (default: monotone flank of the dip).
    #[arg(long)]
    tau_range: Option<Interval>,
    /// Detuning search interval `lo:hi`.
    #[arg(long)]
    mu_range: Option<Interval>,
    /// Detuning held fixed while estimating the delay.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Delay held fixed while estimating the detuning.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantum Fisher information and Cramér-Rao covariance of a state.
    Qfi {
        /// Reproduce a precision table instead of reading a state.
        #[arg(long, value_parser = parse_preset)]
        preset: Option<TablePreset>,
        #[arg(long, default_value_t = 1)]
        repeats: u64,
    },
    /// Precision tables `Δτ√N`, `Δμ√N` for preset sources.
    Tables {
        #[arg(long, value_parser = parse_preset)]
        preset: TablePreset,
    },
    /// Outcome probabilities and Fisher information along one axis.
    FiSweep {
        #[arg(long, value_enum, default_value_t = SweepAxis::Tau)]
        axis: SweepAxis,
        /// `start:stop:count`
        #[arg(long)]
        range: Range,
        /// Value of the other parameter.
        #[arg(long, default_value_t = 0.0)]
        fixed: f64,
    },
    /// Chronocyclic Wigner function on a grid.
    Wigner {
        #[arg(long, default_value_t = 101)]
        nx: usize,
        #[arg(long, default_value_t = 101)]
        ny: usize,
        /// Frequency interval `lo:hi` (default: the spectral support).
        #[arg(long)]
        omega_range: Option<Interval>,
        /// Time interval `lo:hi` (default: six standard deviations).
        #[arg(long)]
        time_range: Option<Interval>,
        #[arg(long, value_enum, default_value_t = Method::Analytic)]
        method: Method,
    },
    /// Draw outcome counts for a delay and detuning.
    Simulate {
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Delay (default: the Fisher-optimal operating point).
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Maximum-likelihood delay or detuning from observed counts.
    Estimate {
        /// `n0,n1,n2`
        #[arg(long, value_parser = parse_counts)]
        counts: TrialCounts,
        #[arg(long, value_enum, default_value_t = WhichArg::Tau)]
        which: WhichArg,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Monte Carlo comparison of the delay estimator with the Cramér-Rao bound.
    CrStudy {
        /// True delay (default: the Fisher-optimal operating point).
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        tau_range: Option<Interval>,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 500)]
        experiments: usize,
    },
    /// Re-run the command recorded in an output's provenance header.
    Replay { file: PathBuf },
}

fn read_state(path: &Path) -> Result<PhaseMatchingSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let spec: PhaseMatchingSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}

fn default_interval(mean: f64, var: f64) -> Interval {
    let half = 6.0 * var.sqrt();
    Interval { lo: mean - half, hi: mean + half }
}

fn sampled(i: Interval, count: usize, what: &str) -> Result<Range, CliError> {
    if count < 2 || !(i.hi > i.lo) {
        return Err(CliError::Validation(format!("{what} needs an increasing interval and at least 2 samples")));
    }
    Ok(Range { start: i.lo, stop: i.hi, count })
}

fn resolve_window(model: &HomModel, which: Which, w: &WindowArgs) -> SearchWindow {
    let preset = SearchWindow::preset(model);
    let (tau_lo, tau_hi) = w.tau_range.map(|i| (i.lo, i.hi)).unwrap_or((preset.tau_lo, preset.tau_hi));
    let mu_default = (0.0, std::f64::consts::SQRT_2 * model.scales().1);
    let (mu_lo, mu_hi) = w.mu_range.map(|i| (i.lo, i.hi)).unwrap_or(mu_default);
    match which {
        Which::Tau => SearchWindow::along_tau(tau_lo, tau_hi, w.mu),
        Which::Mu => SearchWindow::along_mu(mu_lo, mu_hi, w.tau),
        Which::Joint => SearchWindow { tau_lo, tau_hi, mu_lo, mu_hi },
    }
}

fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let state = cli.state.as_deref().map(read_state).transpose()?;
    let need_state = || state.clone().ok_or_else(|| CliError::Validation("this command needs --state".into()));
    let detection = DetectionModel::new(cli.gamma)?;
    let task = match cli.command {
        Command::Replay { .. } => unreachable!("replay is handled before resolution"),
        Command::Qfi { preset: Some(preset), .. } | Command::Tables { preset } => Task::Tables { preset },
        Command::Qfi { preset: None, repeats } => {
            need_state()?;
            if repeats == 0 {
                return Err(CliError::Validation("--repeats must be positive".into()));
            }
            Task::Qfi { repeats }
        }
        Command::FiSweep { axis, range, fixed } => {
            need_state()?;
            Task::FiSweep { axis, range, fixed }
        }
        Command::Wigner { nx, ny, omega_range, time_range, method } => {
            let state = BiphotonState::new(&need_state()?)?;
            let m = phase_space_moments(&state)?;
            let (lo, hi) = state.support();
            let omega = omega_range.unwrap_or(Interval { lo, hi });
            let time = time_range.unwrap_or_else(|| default_interval(m.mean_t, m.var_t));
            Task::Wigner { omega: sampled(omega, nx, "--omega-range")?, time: sampled(time, ny, "--time-range")?, method }
        }
        Command::Simulate { mu, tau, trials } => {
            let model = HomModel::from_spec(&need_state()?, detection)?;
            let tau = match tau {
                Some(t) => t,
                None => fi_optimal_tau(&model, SearchWindow::preset(&model))?,
            };
            Task::Simulate { mu, tau, trials }
        }
        Command::Estimate { counts, which, window } => {
            let model = HomModel::from_spec(&need_state()?, detection)?;
            let which = match which {
                WhichArg::Tau => Which::Tau,
                WhichArg::Mu => Which::Mu,
                WhichArg::Joint => Which::Joint,
            };
            Task::Estimate { counts, which, window: resolve_window(&model, which, &window) }
        }
        Command::CrStudy { tau, tau_range, mu, trials, experiments } => {
            let model = HomModel::from_spec(&need_state()?, detection)?;
            let args = WindowArgs { tau_range, mu_range: None, mu, tau: 0.0 };
            let window = resolve_window(&model, Which::Tau, &args);
            let tau = match tau {
                Some(t) => t,
                None => fi_optimal_tau(&model, window)?,
            };
            Task::CrStudy { tau, window, trials, experiments }
        }
    };
    Ok(RunConfig {
        version: env!("CARGO_PKG_VERSION").to_string(),
        state: if task.needs_state() { state } else { None },
        task,
        gamma: cli.gamma,
        convention: cli.convention,
        format: cli.format,
        seed: cli.seed,
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Io(e.to_string());
    match out {
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(io_err),
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
            tmp.write_all(text.as_bytes()).map_err(io_err)?;
            tmp.as_file().sync_all().map_err(io_err)?;
            tmp.persist(path).map_err(|e| io_err(e.error))?;
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("HOMSENSE_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Validation(format!("HOMSENSE_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let out = cli.out.clone();
    let cfg = match &cli.command {
        Command::Replay { file } => {
            let text = fs::read_to_string(file).map_err(|e| CliError::Validation(format!("{}: {e}", file.display())))?;
            RunConfig::from_header(&text)?
        }
        _ => resolve(cli)?,
    };
    let body = commands::execute(&cfg)?;
    emit(&(cfg.header() + &body), out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("homsense: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
