//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::ConfigFile;
use crate::error::{CliError, ExitStatus};

#[derive(Debug, Parser)]
#[command(name = "curvlab", version, about = "Total scalar curvature examples, norm sweeps and geometric flows")]
pub struct Cli {
    /// `key = value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one member of a family: total, error estimate, bound, R(r).
    Example(ExampleArgs),
    /// Sweep the index i: totals, norms of g_i - g, bound check.
    Sweep(SweepArgs),
    /// Run a flow on a periodic grid and record a time series.
    Flow(FlowArgs),
    /// Moments, oscillatory integrals, closed-form bounds and the boundary audit.
    Integrals(IntegralsArgs),
    /// Run the acceptance criteria and print PASS/FAIL per criterion.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct FamilyArgs {
    /// below, integral, c10, torus, c21, twodim or boundary.
    #[arg(long)]
    pub family: Option<String>,
    /// Dimension (default 2 for twodim, 3 otherwise).
    #[arg(long)]
    pub n: Option<usize>,
    /// Plateau radius r0.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Cutoff transition width (default r0/4).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Height parameter of the `below` family.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Torus side for the `torus` family.
    #[arg(long)]
    pub side: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct QuadArgs {
    /// Absolute quadrature tolerance.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Integrand evaluation budget.
    #[arg(long)]
    pub max_evals: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExampleArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Sequence index i.
    #[arg(long)]
    pub i: Option<f64>,
    /// Number of R(r) samples in the report.
    #[arg(long)]
    pub samples: Option<usize>,
    /// JSON report path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also plot R(r) to this SVG file.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Explicit indices, comma separated.
    #[arg(long, value_name = "LIST")]
    pub i_list: Option<String>,
    /// Geometric sweep start (with --i-ratio and --i-max).
    #[arg(long)]
    pub i_start: Option<f64>,
    /// Geometric sweep ratio, greater than 1.
    #[arg(long)]
    pub i_ratio: Option<f64>,
    /// Largest index of the geometric sweep.
    #[arg(long)]
    pub i_max: Option<f64>,
    /// Sobolev exponents p, comma separated (default 4).
    #[arg(long, value_name = "LIST")]
    pub p: Option<String>,
    /// Radial samples for the norms.
    #[arg(long)]
    pub samples: Option<usize>,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON summary with fitted trends.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Log-log plot of c0, c1, c2 against i.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FlowArgs {
    /// ricci (coupled with heat flow of the weight), deturck or conformal2d.
    #[arg(long)]
    pub kind: Option<String>,
    /// Grid dimension, 2 or 3.
    #[arg(long)]
    pub n: Option<usize>,
    /// Points per axis.
    #[arg(long)]
    pub res: Option<usize>,
    /// Torus side length.
    #[arg(long)]
    pub side: Option<f64>,
    /// Initial data: conformal, anisotropic or high:K.
    #[arg(long)]
    pub perturbation: Option<String>,
    /// Perturbation amplitude.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Amplitude of the initial weight f = A cos(2π y / side).
    #[arg(long)]
    pub weight_amplitude: Option<f64>,
    /// Final time.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Fixed time step (default: the stability limit at every step).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Record every k-th step.
    #[arg(long)]
    pub every: Option<usize>,
    /// Allow 3-D grids finer than 48 points per axis.
    #[arg(long)]
    pub allow_large_grid: bool,
    /// Time-series CSV path (stdout when omitted).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Binary snapshot of the final metric.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct IntegralsArgs {
    /// Dimension for the moments and bounds (default 3).
    #[arg(long)]
    pub n: Option<usize>,
    /// Index i of the Gaussian moments (default 10).
    #[arg(long)]
    pub i: Option<f64>,
    /// Upper limit r0 of the Gaussian moments (default 1).
    #[arg(long)]
    pub r0: Option<f64>,
    /// Real part of the oscillatory exponent (must be negative, default -1).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Imaginary part of the oscillatory exponent (default -0.5).
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Indices for the boundary audit, comma separated (default 2..9).
    #[arg(long, value_name = "LIST")]
    pub audit: Option<String>,
    /// JSON report path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Only run criteria whose id or tag contains this text.
    #[arg(long)]
    pub filter: Option<String>,
    /// Override a pinned tolerance, `criterion.name=value`; repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    pub tol: Vec<String>,
    /// List criteria and their tolerances without running them.
    #[arg(long)]
    pub list: bool,
}

/// Parse `args` (including the program name), run, and report errors on
/// stderr. Returns the exit status.
pub fn run<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::Validation } else { ExitStatus::Success };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitStatus::Success,
        Err(e) => {
            match &e {
                CliError::CriteriaFailed { .. } => eprintln!("{e}"),
                _ => eprintln!("error: {e}"),
            }
            e.exit_status()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    crate::init_threads()?;
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Example(a) => commands::example(a, &cfg),
        Command::Sweep(a) => commands::sweep(a, &cfg),
        Command::Flow(a) => commands::flow(a, &cfg),
        Command::Integrals(a) => commands::integrals(a, &cfg),
        Command::Verify(a) => commands::verify(a, &cfg),
    }
}
