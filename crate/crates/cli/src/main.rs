//! `symsplit`: build, split, solve and benchmark centrosymmetric tomography
//! systems from the command line.
//!
//! Exit codes: 0 success, 1 failed check or computation, 2 usage or
//! configuration error, 3 I/O error.

mod commands;
mod example1;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use symsplit::phantom::PhantomKind;
use symsplit::{Method, Mode};

#[derive(Parser, Debug)]
#[command(
    name = "symsplit",
    version,
    about = "Split centrosymmetric tomography systems into two independent halves"
)]
pub struct Cli {
    /// Worker threads for the matrix build and the split solve.
    /// Defaults to the number of available cores.
    #[arg(long, global = true, env = "SYMSPLIT_PARALLEL")]
    pub parallel: Option<usize>,

    /// Print a machine-readable JSON object instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the 4x6 worked example and compare with the reference values.
    Example1(Example1Args),
    /// Trace a scan geometry into a system matrix and projection data.
    Build(BuildArgs),
    /// Solve a system read from disk, directly or through the split.
    Solve(SolveArgs),
    /// Time direct against split solves over a series of grid sizes.
    Bench(BenchArgs),
    /// Build, project, split-solve and write the reconstruction as PGM.
    Recon(ReconArgs),
}

#[derive(Args, Debug)]
pub struct Example1Args {
    /// Add this value to every right-hand side entry before solving.
    /// A nonzero value is a negative control and must fail the check.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub perturb: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhantomChoice {
    SheppLogan,
    ModifiedSheppLogan,
    None,
}

impl PhantomChoice {
    pub fn kind(self) -> Option<PhantomKind> {
        match self {
            PhantomChoice::SheppLogan => Some(PhantomKind::SheppLogan),
            PhantomChoice::ModifiedSheppLogan => Some(PhantomKind::ModifiedSheppLogan),
            PhantomChoice::None => None,
        }
    }
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_matrix: PathBuf,
    /// Projections of the phantom; all zeros when no phantom is requested.
    #[arg(long)]
    pub out_rhs: Option<PathBuf>,
    /// Rasterized phantom in voxel order, usable as `solve --truth`.
    #[arg(long)]
    pub out_truth: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "none")]
    pub phantom: PhantomChoice,
    /// Standard deviation of additive Gaussian noise on the projections.
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SolverFlags {
    #[arg(long, default_value = "dense", value_parser = parse_method)]
    pub method: Method,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// Relative stopping tolerance of the iterative methods.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// SART relaxation factor in (0, 2].
    #[arg(long, default_value_t = 1.0)]
    pub relaxation: f64,
    /// Largest rows*cols the dense solver will densify.
    #[arg(long, default_value_t = symsplit::solvers::DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,
}

impl SolverFlags {
    pub fn options(&self) -> symsplit::SolveOptions {
        symsplit::SolveOptions {
            method: self.method,
            max_iters: self.max_iters,
            tol: self.tol,
            relaxation: self.relaxation,
            dense_cap: self.dense_cap,
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub rhs: PathBuf,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Mode,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Absolute tolerance of the centrosymmetry check in split mode.
    #[arg(long, default_value_t = symsplit::centro::DEFAULT_SYMMETRY_TOL)]
    pub symmetry_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "32,64")]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "direct,split", value_parser = parse_mode)]
    pub modes: Vec<Mode>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Report path; `.json` selects JSON, anything else CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fixed method. By default the dense solver runs when the matrix fits
    /// under the dense cap and CGLS otherwise.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    #[arg(long, default_value_t = symsplit::solvers::DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
}

#[derive(Args, Debug)]
pub struct ReconArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_image: PathBuf,
    /// Reconstructed values in voxel order.
    #[arg(long)]
    pub out_values: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "shepp-logan")]
    pub phantom: PhantomChoice,
    #[arg(long, default_value = "split", value_parser = parse_mode)]
    pub mode: Mode,
    /// Solver; by default dense when the matrix fits under the cap, else CGLS.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = symsplit::solvers::DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    CheckFailed(String),
    #[error(transparent)]
    Core(#[from] symsplit::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use symsplit::Error as E;
        match self {
            CliError::Usage(_) | CliError::Pool(_) => 2,
            CliError::CheckFailed(_) => 1,
            CliError::Io(_) => 3,
            CliError::Core(e) => match e {
                E::Io(_) | E::File { .. } | E::Parse { .. } | E::Csv(_) | E::Json(_) => 3,
                E::Config(_) | E::Geometry(_) => 2,
                _ => 1,
            },
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = match cli.parallel {
        Some(0) => return Err(CliError::Usage("--parallel must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    let json = cli.json;
    pool.install(|| match cli.command {
        Command::Example1(args) => example1::run(&args, json),
        Command::Build(args) => commands::build(&args, json),
        Command::Solve(args) => commands::solve(&args, json),
        Command::Bench(args) => commands::bench(&args, json),
        Command::Recon(args) => commands::recon(&args, json),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
