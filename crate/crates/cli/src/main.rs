//! `isocond`: command-line front end for the 3-PRR kinetostatic analysis library.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isocond::{Pose, WorkingMode};

/// Kinetostatic analysis of the planar 3-PRR parallel manipulator.
///
/// Exit codes: 0 success, 1 usage or input parse error, 2 domain error
/// (unreachable pose, singular configuration, empty workspace, ...).
#[derive(Debug, Parser)]
#[command(name = "isocond", version)]
struct Cli {
    /// Design parameters as JSON (keys R_mm, l_mm, r_mm and optional angle arrays).
    /// Defaults to R = 200, l = 200, r = 100 mm with symmetric layout.
    #[arg(long, global = true, value_name = "FILE")]
    params: Option<PathBuf>,

    /// Significant digits of numeric output.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inverse kinematics: rho, m and gamma per limb.
    Ik(PoseArgs),
    /// Direct kinematics by Newton iteration from a seed pose.
    Dk {
        /// Actuated joint positions rho1,rho2,rho3 in mm.
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        rho: [f64; 3],
        /// Starting pose x,y,theta (mm, mm, rad).
        #[arg(long, value_parser = parse_pose, allow_hyphen_values = true, default_value = "0,0,0")]
        seed: Pose,
    },
    /// Kinematic matrices A, B, A_bar, K_bar and J as row-major JSON.
    Jacobians(MatrixArgs),
    /// Parallel/serial singularity classification.
    Classify(MatrixArgs),
    /// Characteristic length: closed form for --gamma, otherwise from the isotropy search.
    Charlen {
        /// Limb angle gamma in rad; L = sqrt(2) r sin(gamma).
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
    },
    /// Isotropy residual of K_bar and the geometric equality conditions at a pose.
    Isotropy(MatrixArgs),
    /// Workspace sweep of the orientation-optimized conditioning index.
    Sweep(SweepArgs),
    /// Global conditioning index per mode class and matrix (2 x 3 table).
    Compare(GridArgs),
}

#[derive(Debug, Args)]
struct PoseArgs {
    /// Pose x,y,theta (mm, mm, rad).
    #[arg(long, value_parser = parse_pose, allow_hyphen_values = true)]
    pose: Pose,
    /// Working mode as three signs, e.g. +++ or -+-.
    #[arg(long, value_parser = parse_mode, allow_hyphen_values = true, default_value = "+++")]
    mode: WorkingMode,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    #[command(flatten)]
    at: PoseArgs,
    /// Characteristic length L in mm [default: sqrt(2) r].
    #[arg(long)]
    length: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KappaB {
    /// bmax / bmin.
    Ratio,
    /// sqrt(bmax / bmin).
    SqrtRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Gnuplot,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Gnuplot => "dat",
        }
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, default_value_t = 101)]
    nx: usize,
    #[arg(long, default_value_t = 101)]
    ny: usize,
    /// Orientation samples 2 pi k / ntheta.
    #[arg(long, default_value_t = 120)]
    ntheta: usize,
    #[arg(long, default_value_t = -300.0, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 300.0, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = -300.0, allow_hyphen_values = true)]
    y_min: f64,
    #[arg(long, default_value_t = 300.0, allow_hyphen_values = true)]
    y_max: f64,
    /// Characteristic length L in mm [default: sqrt(2) r].
    #[arg(long)]
    length: Option<f64>,
    /// Condition number convention for B.
    #[arg(long, value_enum, default_value_t = KappaB::Ratio)]
    kappa_b: KappaB,
    /// Refine the best orientation of each node by golden-section search.
    #[arg(long)]
    refine: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Matrix to condition: A (A_bar), B or K (K_bar).
    #[arg(long, value_parser = parse_matrix, default_value = "K")]
    matrix: isocond::MatrixKind,
    /// Working mode as three signs.
    #[arg(long, value_parser = parse_mode, allow_hyphen_values = true, default_value = "+++")]
    mode: WorkingMode,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated isoconditioning levels in (0, 1).
    #[arg(long, value_delimiter = ',')]
    levels: Vec<f64>,
    /// Grid file format; loci use gnuplot unless this is json.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Grid output file [default: sweep.<csv|json|dat>].
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Loci output file when --levels is given [default: loci.<json|dat>].
    #[arg(long, value_name = "FILE")]
    loci_output: Option<PathBuf>,
}

fn parse_numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, String> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != n || values.iter().any(|v| !v.is_finite()) {
        return Err(format!("expected {what} as {n} finite comma-separated numbers"));
    }
    Ok(values)
}

fn parse_pose(s: &str) -> Result<Pose, String> {
    let v = parse_numbers(s, 3, "x,y,theta")?;
    Ok(Pose::new(v[0], v[1], v[2]))
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v = parse_numbers(s, 3, "three values")?;
    Ok([v[0], v[1], v[2]])
}

fn parse_mode(s: &str) -> Result<WorkingMode, String> {
    s.parse()
        .map_err(|_| format!("mode must be three signs such as +++ or -+-, got {s:?}"))
}

fn parse_matrix(s: &str) -> Result<isocond::MatrixKind, String> {
    s.parse().map_err(|e: isocond::SweepError| e.to_string())
}

/// Error carrying its exit code.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Domain(e) => write!(f, "{e:#}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
