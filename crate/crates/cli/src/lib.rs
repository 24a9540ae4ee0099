//! `cmdesign` command-line harness.
//!
//! Subcommands `design`, `eval`, `sweep`, `detect` and `bounds` wrap the
//! library. Output goes to `--out` when given, otherwise to stdout. Exit
//! codes: 0 ok, 2 usage, 3 optimizer, 4 budget, 5 model violation.

pub mod config;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cmdesign::design::{minimize_coherence, minimize_sum_coherence};
use cmdesign::detect::{simulate_detection, DETECTION_CSV_HEADER};
use cmdesign::io::{read_frame, write_frame_string};
use cmdesign::matrix::tightness_defect;
use cmdesign::metrics::{bound_sheet, worst_case_min_snr_with, EvalOptions, ReportOptions, BOUND_SHEET_CSV_HEADER};
use cmdesign::{DesignConfig, DetectionSetup, Error, FrameReport, MeasurementMatrix, Target};
use num_complex::Complex64;

use config::ConfigFile;
use sweep::{run_sweep, sweep_csv, DesignSource, SweepMode, SweepSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_OPTIMIZER: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;
pub const EXIT_MODEL: u8 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn optimizer(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_OPTIMIZER,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::NotTight { .. } | Error::NonUniformFrame { .. } | Error::SingularA => EXIT_MODEL,
            Error::RankDeficient => EXIT_OPTIMIZER,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cmdesign", version, about = "Design and evaluate compressive measurement matrices")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Seed for every random choice (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Maximum number of platforms to enumerate exactly.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Tightness tolerance on ‖CCᴴ − I‖_F.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Flat key=value file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize a real uniform tight frame and write it as a frame file.
    Design(DesignArgs),
    /// Evaluate a frame file: one CSV row per k.
    Eval(EvalArgs),
    /// Compare designed frames against random right-orthogonal baselines.
    Sweep(SweepArgs),
    /// Monte Carlo Neyman-Pearson detection on a tight frame.
    Detect(DetectArgs),
    /// Welch, simplex and ETF-existence bounds for (m, N).
    Bounds(BoundsArgs),
}

#[derive(Debug, Args, Default)]
pub struct OptimizerArgs {
    #[arg(long)]
    pub target: Option<Target>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub smoothing_p: Option<f64>,
    #[arg(long)]
    pub smoothing_p_final: Option<f64>,
    #[arg(long)]
    pub step_size: Option<f64>,
    #[arg(long)]
    pub step_decay: Option<f64>,
    #[arg(long)]
    pub convergence_tol: Option<f64>,
    /// Accept designs that fail the uniform-tight check instead of exiting 3.
    #[arg(long)]
    pub allow_nonconverged: bool,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long = "N", alias = "n")]
    pub n: usize,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub frame: PathBuf,
    /// Sparsity levels, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    /// Fall back to this many sampled platforms when the budget is exceeded.
    #[arg(long)]
    pub sample: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub mode: SweepMode,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "N", alias = "n")]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub from: usize,
    #[arg(long)]
    pub to: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    #[arg(long)]
    pub baseline_trials: Option<usize>,
    #[arg(long, value_enum)]
    pub source: Option<DesignSource>,
    #[arg(long)]
    pub import_dir: Option<PathBuf>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    pub frame: PathBuf,
    /// False-alarm rates, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub gamma: Vec<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub noise_power: Option<f64>,
    /// Use the worst-case unit signal over k-sparse platforms.
    #[arg(long, conflicts_with = "signal_index")]
    pub worst_signal: Option<usize>,
    /// Use the unit coefficient vector e_i (default e_0).
    #[arg(long)]
    pub signal_index: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long = "N", alias = "n")]
    pub n: usize,
    /// Print a CSV header and row instead of key=value lines.
    #[arg(long)]
    pub csv: bool,
}

/// Common settings after merging flags, config file and defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub budget: u128,
    pub tolerance: f64,
    pub file: ConfigFile,
}

impl Settings {
    pub fn resolve(common: &CommonArgs) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let tolerance = file.pick(common.tolerance, "tolerance", cmdesign::matrix::TIGHTNESS_TOLERANCE)?;
        if !(tolerance >= 0.0) {
            return Err(CliError::usage("--tolerance must be non-negative"));
        }
        let threads = match common.threads {
            Some(t) => Some(t),
            None => file.get("threads")?,
        };
        if threads == Some(0) {
            return Err(CliError::usage("--threads must be positive"));
        }
        Ok(Self {
            seed: file.pick(common.seed, "seed", 0)?,
            threads,
            out: common.out.clone(),
            budget: file.pick(common.budget, "budget", cmdesign::metrics::DEFAULT_BUDGET)?,
            tolerance,
            file,
        })
    }

    fn design_config(&self, a: &OptimizerArgs) -> Result<(DesignConfig, bool), CliError> {
        let d = DesignConfig::default();
        let f = &self.file;
        let config = DesignConfig {
            seed: self.seed,
            max_iterations: f.pick(a.max_iterations, "max_iterations", d.max_iterations)?,
            restarts: f.pick(a.restarts, "restarts", d.restarts)?,
            smoothing_p: f.pick(a.smoothing_p, "smoothing_p", d.smoothing_p)?,
            smoothing_p_final: f.pick(a.smoothing_p_final, "smoothing_p_final", d.smoothing_p_final)?,
            step_size: f.pick(a.step_size, "step_size", d.step_size)?,
            step_decay: f.pick(a.step_decay, "step_decay", d.step_decay)?,
            convergence_tol: f.pick(a.convergence_tol, "convergence_tol", d.convergence_tol)?,
            target: f.pick(a.target, "target", d.target)?,
        };
        config.validate().map_err(|e| CliError::usage(e.to_string()))?;
        let allow = a.allow_nonconverged || f.get("allow_nonconverged")?.unwrap_or(false);
        Ok((config, allow))
    }
}

fn emit(settings: &Settings, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &settings.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::usage(format!("cannot write output: {e}"))),
    }
}

fn load_frame(path: &Path) -> Result<MeasurementMatrix, CliError> {
    Ok(read_frame(path)?.into_matrix())
}

fn cmd_design(s: &Settings, a: &DesignArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (config, allow) = s.design_config(&a.optimizer)?;
    let r = match config.target {
        Target::Coherence => minimize_coherence(a.m, a.n, &config)?,
        Target::SumCoherence => minimize_sum_coherence(a.m, a.n, &config)?,
    };
    let summary = format!("target={}\n{}", config.target, r.summary());
    if !r.converged && !allow {
        let _ = stderr.write_all(summary.as_bytes());
        return Err(CliError::optimizer("design did not converge to a uniform tight frame"));
    }
    let frame = write_frame_string(&r.matrix);
    match &s.out {
        Some(_) => {
            emit(s, &frame, stdout)?;
            stdout.write_all(summary.as_bytes()).map_err(|e| CliError::usage(e.to_string()))
        }
        None => {
            let _ = stderr.write_all(summary.as_bytes());
            emit(s, &frame, stdout)
        }
    }
}

fn cmd_eval(s: &Settings, a: &EvalArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let c = load_frame(&a.frame)?;
    for &k in &a.k {
        if k == 0 || k > c.cols() {
            return Err(CliError::usage(format!("k={k} must lie in 1..={}", c.cols())));
        }
    }
    let opts = ReportOptions {
        budget: s.budget,
        tolerance: s.tolerance,
        sample: a.sample.map(|n| (n, s.seed)),
    };
    let report = FrameReport::build(&c, &a.k, &opts)?;
    emit(s, &report.to_csv(), stdout)
}

fn cmd_sweep(s: &Settings, a: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (config, allow_nonconverged) = s.design_config(&a.optimizer)?;
    let f = &s.file;
    let import_dir = match &a.import_dir {
        Some(p) => Some(p.clone()),
        None => f.get::<String>("import_dir")?.map(PathBuf::from),
    };
    let spec = SweepSpec {
        mode: a.mode,
        m: a.m,
        n: a.n,
        k: a.k,
        from: a.from,
        to: a.to,
        step: a.step,
        baseline_trials: f.pick(a.baseline_trials, "baseline_trials", 100)?,
        design_source: f.pick(a.source, "source", DesignSource::Optimize)?,
        import_dir,
        config,
        allow_nonconverged,
        budget: s.budget,
    };
    let rows = run_sweep(&spec)?;
    emit(s, &sweep_csv(&rows), stdout)
}

fn unit(n: usize, i: usize) -> Vec<Complex64> {
    (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()
}

fn cmd_detect(s: &Settings, a: &DetectArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    for &g in &a.gamma {
        if !(g > 0.0 && g < 1.0) {
            return Err(CliError::usage(format!("false-alarm rate {g} must lie in (0, 1)")));
        }
    }
    let c = load_frame(&a.frame)?;
    let defect = tightness_defect(&c);
    if defect > s.tolerance {
        return Err(Error::NotTight { defect }.into());
    }
    let n = c.cols();
    let signal = match (a.worst_signal, a.signal_index) {
        (Some(k), _) => {
            if k == 0 || k > n {
                return Err(CliError::usage(format!("--worst-signal {k} must lie in 1..={n}")));
            }
            worst_case_min_snr_with(&c, k, &EvalOptions { budget: s.budget })?
                .signal
                .embed(n)
        }
        (None, i) => {
            let i = i.unwrap_or(0);
            if i >= n {
                return Err(CliError::usage(format!("--signal-index {i} must be below N={n}")));
            }
            unit(n, i)
        }
    };
    let trials = s.file.pick(a.trials, "trials", 100_000)?;
    let noise_power = s.file.pick(a.noise_power, "noise_power", 1.0)?;
    let mut out = String::from(DETECTION_CSV_HEADER);
    out.push('\n');
    for &gamma in &a.gamma {
        let setup = DetectionSetup {
            matrix: c.clone(),
            signal: signal.clone(),
            noise_power,
            false_alarm_rate: gamma,
            trials,
            seed: s.seed,
        };
        out += &simulate_detection(&setup)?.csv_row(gamma);
        out.push('\n');
    }
    emit(s, &out, stdout)
}

fn cmd_bounds(s: &Settings, a: &BoundsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let sheet = bound_sheet(a.m, a.n)?;
    let text = if a.csv {
        format!("{BOUND_SHEET_CSV_HEADER}\n{}\n", sheet.csv_row())
    } else {
        sheet.to_key_value()
    };
    emit(s, &text, stdout)
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let settings = Settings::resolve(&cli.common)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = settings.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::usage(format!("cannot start thread pool: {e}")))?;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let result = pool.install(|| match &cli.command {
        Command::Design(a) => cmd_design(&settings, a, &mut out, &mut err),
        Command::Eval(a) => cmd_eval(&settings, a, &mut out),
        Command::Sweep(a) => cmd_sweep(&settings, a, &mut out),
        Command::Detect(a) => cmd_detect(&settings, a, &mut out),
        Command::Bounds(a) => cmd_bounds(&settings, a, &mut out),
    });
    let _ = stderr.write_all(&err);
    stdout
        .write_all(&out)
        .map_err(|e| CliError::usage(format!("cannot write output: {e}")))?;
    result
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
