//! `conflab`: reproducible experiments over the conflab-core modules.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 spec/schema error, 3 numerical
//! infeasibility, 4 internal invariant breach.

mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conflab_core::Error;

#[derive(Debug, Parser)]
#[command(name = "conflab", version, about = "Conformal geometry workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Curvature fields of a chart spec, one CSV row per interior node.
    Curvature(CurvatureArgs),
    /// Build a neck and audit the closed-form curvature against the chart path.
    Neck(NeckArgs),
    /// Minimize the Yamabe quotient; necks also get a perturbation bracket.
    Yamabe(YamabeArgs),
    /// Dial a neck to a Weyl-mass target and certify its Yamabe constant.
    Dial(DialArgs),
    /// YW-picture of a catalog four-manifold as CSV and SVG.
    Ywpicture(YwArgs),
    /// Run the oracle cross-check suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    /// JSON chart spec.
    #[arg(long)]
    pub input: PathBuf,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Nodes per axis, keeping the chart box fixed.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NeckArgs {
    /// JSON neck spec.
    #[arg(long)]
    pub input: PathBuf,
    /// JSON report destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Profile CSV (`t, a, b, c, R_slice, R_product`).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Inverse chart spacing of the oracle patches.
    #[arg(long, default_value_t = 25)]
    pub resolution: usize,
}

#[derive(Debug, Args)]
pub struct YamabeArgs {
    /// JSON chart or neck spec.
    #[arg(long)]
    pub input: PathBuf,
    /// JSON report destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Descent history CSV (`iteration, Q`).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Chart specs: nodes per axis. Neck specs: samples per unit length.
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DialArgs {
    /// Weyl-mass target.
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Width of the Weyl window and Yamabe slack.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Neck spec supplying `h`, `L`, `margin` and `cutoff`; `L_bar` is ignored.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// JSON certificate destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Profile CSV of the dialled neck.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct YwArgs {
    /// Catalog name: S4, CP2, K3, T2xSigma(g), SigmaxSigma(g1,g2), CH2_quotient(tau).
    #[arg(long)]
    pub name: String,
    /// SVG destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG destination (same as `--out`).
    #[arg(long, conflicts_with = "out")]
    pub svg: Option<PathBuf>,
    /// CSV destination; stdout when no output is given.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced resolutions and sample counts.
    #[arg(long)]
    pub quick: bool,
    /// JSON table destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(
            Error::Schema { .. }
            | Error::UnknownManifold(_)
            | Error::InvalidArgument(_)
            | Error::InvalidGrid(_)
            | Error::GridTooSmall(_)
            | Error::Dimension { .. }
            | Error::GuardViolated { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::NotSymmetric { .. }
            | Error::CoordinateSingularity(_),
        ) => 2,
        Some(Error::DialDegenerate | Error::Infeasible(_) | Error::Hypothesis(_) | Error::ZeroTrialFunction) => 3,
        Some(Error::InvariantBreach(_) | Error::Overflow | Error::GridMismatch(_)) => 4,
        None => 1,
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("CONFLAB_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| Error::Schema {
        location: "CONFLAB_THREADS".into(),
        message: format!("{v:?} is not a positive integer"),
    })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Curvature(a) => commands::curvature(a),
        Command::Neck(a) => commands::neck(a),
        Command::Yamabe(a) => commands::yamabe(a),
        Command::Dial(a) => commands::dial(a),
        Command::Ywpicture(a) => commands::ywpicture(a),
        Command::Verify(a) => verify::run(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("conflab: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
