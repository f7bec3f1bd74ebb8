//! `cone-lab`: membership oracles, positive maps, polytope tensor products
//! and the reproduction suite from the command line.
//!
//! Every command prints a run report (JSON by default) and exits with
//! 0 for in/pass, 1 for out/fail, 2 for unknown, 64 for usage errors,
//! 65 for malformed input and 66 for unreadable files.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{CliError, Format};

#[derive(Parser, Debug)]
#[command(name = "cone-lab", version, about = "Tensor products of cones and state spaces")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Master seed for every randomised routine.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide membership of a bipartite operator in one of the cones.
    Membership(MembershipArgs),
    /// Choi and Jamiolkowski operators of a map.
    Choi(MapArgs),
    /// Positivity, complete positivity and unitality of a map.
    MapCheck(MapArgs),
    /// Closed form, witness bound and cb-norm estimate for κ(M_n, M_m).
    Kappa(KappaArgs),
    /// Polytope tensor products.
    Polytope {
        #[command(subcommand)]
        command: PolytopeCommand,
    },
    /// Search for a point of the maximal tensor product outside the minimal one.
    Barker(PairArgs),
    /// Check that X(s,t) = stS is non-positive but nonnegative on product states.
    WitnessX(WitnessArgs),
    /// Check the failure of Riesz interpolation in M₂.
    Riesz(RieszArgs),
    /// Check that trace simplices tensor like the algebras.
    TraceSimplex(TraceArgs),
    /// Run the full acceptance check list.
    Reproduce(ReproduceArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConeKind {
    Separable,
    Psd,
    Ppt,
    BlockPositive,
}

#[derive(Args, Debug)]
pub struct MembershipArgs {
    #[arg(long, value_enum)]
    pub cone: ConeKind,
    /// Bipartite operator JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Tolerance; defaults to 1e-9 for spectral tests and 1e-6 for the optimiser.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Optimiser multistarts (block-positive default 200, separable default 20 per round).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Gradient steps per start (block-positive default 500, separable default 200).
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MapArgs {
    /// Map JSON file.
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct KappaArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub n: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub m: u32,
    /// Estimate the cb norm of this map instead of the default corner transpose.
    #[arg(long)]
    pub estimate_cb: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub starts: usize,
    #[arg(long, default_value_t = 300)]
    pub steps: usize,
}

#[derive(Subcommand, Debug)]
pub enum PolytopeCommand {
    /// Minimal and maximal tensor products of two polytopes.
    Tensor(TensorArgs),
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[arg(long)]
    pub k1: PathBuf,
    #[arg(long)]
    pub k2: PathBuf,
}

#[derive(Args, Debug)]
pub struct TensorArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Also search for a gap point.
    #[arg(long)]
    pub gap: bool,
    /// Also compute the relative bound of the maximal over the minimal product.
    #[arg(long)]
    pub relative_bound: bool,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..=8))]
    pub n: u32,
    /// Comma-separated grid points in [0, 1].
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct RieszArgs {
    #[arg(long, default_value_t = 0.02)]
    pub step: f64,
    #[arg(long, default_value_t = 0.05)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    /// Block sizes of the first algebra, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<usize>,
    /// Block sizes of the second algebra.
    #[arg(long, value_delimiter = ',', required = true)]
    pub b: Vec<usize>,
    /// A further tensor factor such as `2,2` (repeatable).
    #[arg(long = "and", action = clap::ArgAction::Append)]
    pub more: Vec<String>,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Reduced sample counts and optimiser budgets.
    #[arg(long)]
    pub quick: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli.command, cli.seed) {
        Ok(report) => {
            report.print(cli.format);
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("cone-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
