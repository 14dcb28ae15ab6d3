//! `nbarrier`: bounds, barrier levels, tangent estimates, nonexistence
//! certificates, and wave solves from the command line.
//!
//! Structured results go to stdout as JSON (sweeps and plots as CSV);
//! diagnostics go to stderr, controlled by `NBARRIER_LOG`. Exit codes:
//! 0 success or pass, 2 validation error, 3 inconclusive certificate,
//! 4 bound violation, 5 solver non-convergence.

mod commands;
mod log;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nbarrier::nonexistence::DiffusionRange;
use nbarrier::tangent::Composition;

#[derive(Parser)]
#[command(
    name = "nbarrier",
    version,
    about = "Bounds and certificates for competitive traveling waves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all constant equilibria of a system.
    Equilibria(EquilibriaArgs),
    /// Intercept box of a system, optionally with the sampled sign check.
    Box(BoxArgs),
    /// Two-sided bounds on the weighted density.
    Bounds(BoundsArgs),
    /// Lower and upper barrier triples.
    Barrier(BarrierArgs),
    /// Tangent level and improved lower bound for a two-species system.
    Tangent(TangentArgs),
    /// Nonexistence certificate for a four-species system.
    Nonexist(NonexistArgs),
    /// Solve the truncated wave boundary value problem.
    Solve(SolveArgs),
    /// Check a solved profile against the bounds.
    Verify(VerifyArgs),
    /// Sweep one parameter and emit a CSV table.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SystemArg {
    /// System JSON: a file path, or an embedded preset name
    /// (may_leonard, lv4, bistable_two_species).
    #[arg(long)]
    system: String,
}

#[derive(Args)]
struct OutArg {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquilibriaArgs {
    #[command(flatten)]
    system: SystemArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct BoxArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Also run the sampled sign check with this many points per region.
    #[arg(long, requires = "seed")]
    samples: Option<usize>,
    /// RNG seed for --samples.
    #[arg(long, requires = "samples")]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Positive weights, comma separated, one per species.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    /// Lower-bound switch; overrides the default of 1.
    #[arg(long, conflicts_with_all = ["e_minus", "e_plus"])]
    chi: Option<u8>,
    /// End state at -infinity; with --e-plus, the switch is derived.
    #[arg(long, value_delimiter = ',', requires = "e_plus")]
    e_minus: Option<Vec<f64>>,
    /// End state at +infinity.
    #[arg(long, value_delimiter = ',', requires = "e_minus")]
    e_plus: Option<Vec<f64>>,
    /// Max-norm tolerance for recognizing the origin end state.
    #[arg(long, default_value_t = 1e-9)]
    state_tol: f64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct BarrierArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Positive weights, comma separated, one per species.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompositionArg {
    Nested,
    Reweighted,
}

impl From<CompositionArg> for Composition {
    fn from(c: CompositionArg) -> Composition {
        match c {
            CompositionArg::Nested => Composition::Nested,
            CompositionArg::Reweighted => Composition::Reweighted,
        }
    }
}

#[derive(Args)]
struct TangentArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    k: f64,
    #[arg(long)]
    a1: f64,
    #[arg(long)]
    a2: f64,
    #[arg(long)]
    d: f64,
    /// How the tangent level is turned into the final bound.
    #[arg(long, value_enum, default_value_t = CompositionArg::Nested)]
    composition: CompositionArg,
    /// Write a CSV sampling of the curve and the three barrier lines here.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum RangeArg {
    /// Diffusion extrema over all four species.
    All,
    /// Extrema over the three surviving species only.
    First3,
}

impl From<RangeArg> for DiffusionRange {
    fn from(r: RangeArg) -> DiffusionRange {
        match r {
            RangeArg::All => DiffusionRange::All,
            RangeArg::First3 => DiffusionRange::FirstThree,
        }
    }
}

#[derive(Args)]
struct NonexistArgs {
    #[command(flatten)]
    system: SystemArg,
    #[arg(long, value_enum, default_value_t = RangeArg::All)]
    range: RangeArg,
    /// Also bisect the largest certified growth rate of the fourth species.
    #[arg(long)]
    threshold: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    system: SystemArg,
    /// End state at -infinity, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    e_minus: Vec<f64>,
    /// End state at +infinity, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    e_plus: Vec<f64>,
    /// Domain half length L; the grid covers [-L, L].
    #[arg(long)]
    half_length: f64,
    /// Grid spacing h.
    #[arg(long)]
    spacing: f64,
    /// Override the wave speed stored in the system file.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    newton_tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Ramp the wave speed up in this many equal stages.
    #[arg(long, default_value_t = 1)]
    continuation_steps: usize,
    /// Transition width of the sigmoid initial guess.
    #[arg(long, default_value_t = 4.0)]
    guess_width: f64,
    /// Profile CSV path; metadata goes to `<path>.meta.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    system: SystemArg,
    /// Profile CSV written by `solve`; expects `<path>.meta.json` next to it.
    #[arg(long)]
    profile: PathBuf,
    /// Positive weights, comma separated, one per species.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    /// Slack added to both bounds; defaults to 10 h^2 + 1e-8.
    #[arg(long)]
    tol: Option<f64>,
    /// Max-norm tolerance for recognizing the origin end state.
    #[arg(long, default_value_t = 1e-9)]
    state_tol: f64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SweepArgs {
    #[command(subcommand)]
    target: SweepTarget,
}

#[derive(Subcommand)]
enum SweepTarget {
    /// Sweep one tangent parameter; CSV columns include the case id.
    Tangent(SweepTangentArgs),
    /// Sweep the growth rate of the fourth species.
    Nonexist(SweepNonexistArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TangentParam {
    Alpha,
    Beta,
    K,
    A1,
    A2,
    D,
}

impl TangentParam {
    fn name(self) -> &'static str {
        match self {
            TangentParam::Alpha => "alpha",
            TangentParam::Beta => "beta",
            TangentParam::K => "k",
            TangentParam::A1 => "a1",
            TangentParam::A2 => "a2",
            TangentParam::D => "d",
        }
    }
}

#[derive(Args)]
struct SweepTangentArgs {
    /// Which parameter to sweep.
    #[arg(long, value_enum)]
    param: TangentParam,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    step: f64,
    /// Base values; the swept parameter's base is ignored.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long, default_value_t = 2.0)]
    a1: f64,
    #[arg(long, default_value_t = 2.0)]
    a2: f64,
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    #[arg(long, value_enum, default_value_t = CompositionArg::Nested)]
    composition: CompositionArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum NonexistParam {
    Sigma4,
}

#[derive(Args)]
struct SweepNonexistArgs {
    #[command(flatten)]
    system: SystemArg,
    #[arg(long, value_enum, default_value_t = NonexistParam::Sigma4)]
    param: NonexistParam,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    step: f64,
    #[arg(long, value_enum, default_value_t = RangeArg::All)]
    range: RangeArg,
    #[command(flatten)]
    out: OutArg,
}

fn main() -> ExitCode {
    if let Err(msg) = log::init() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
