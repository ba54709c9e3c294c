//! Command-line harness for the Gibbs generalization laboratory:
//! configure problems, run verification suites and parameter sweeps,
//! persist CSV, emit SVG charts.
//!
//! Exit codes: 0 pass, 2 assertion failure, 3 config error, 4 numeric
//! divergence.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod svg;

use commands::RunContext;
use config::Config;
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "gibbs-lab",
    about = "Numerical laboratory for the Gibbs learning rule and its exact generalization identity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Flat JSON config with dotted keys (e.g. {"problem.n": 10}).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed; overrides the config's "seed".
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory; overrides the config's "out".
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker pool size. Never changes results, only wall-clock time.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact identity alpha*gen = I_SKL on random enumerable problems.
    VerifyThm1Discrete,
    /// Monte-Carlo generalization error vs the Gaussian closed form.
    VerifyThm1Gaussian,
    /// Closed forms and bounds along an n or alpha axis, with slopes.
    Sweep,
    /// Mixture-domain concavity of the generalization error.
    MixtureConcavity,
    /// Langevin convergence to the Gibbs posterior, by checkpoint.
    SgldConverge,
    /// Every bound next to the exact value it bounds.
    BoundsCompare,
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };

    let seed = match (cli.seed, cfg.u64_opt("seed")?) {
        (Some(s), _) => s,
        (None, Some(s)) => s,
        (None, None) => {
            return Err(CliError::Config(
                "a master seed is required (--seed or config key \"seed\")".into(),
            ))
        }
    };
    let out_dir = match (&cli.out, cfg.string("out", "")?) {
        (Some(dir), _) => dir.clone(),
        (None, s) if !s.is_empty() => PathBuf::from(s),
        (None, _) => PathBuf::from("."),
    };
    std::fs::create_dir_all(&out_dir)?;
    let ctx = RunContext { seed, out_dir, timing: cfg.bool("timing", false)? };

    match cli.command {
        Command::VerifyThm1Discrete => commands::thm1_discrete::run(cfg, &ctx),
        Command::VerifyThm1Gaussian => commands::thm1_gaussian::run(cfg, &ctx),
        Command::Sweep => commands::sweep::run(cfg, &ctx),
        Command::MixtureConcavity => commands::mixture::run(cfg, &ctx),
        Command::SgldConverge => commands::sgld::run(cfg, &ctx),
        Command::BoundsCompare => commands::bounds_compare::run(cfg, &ctx),
    }
}

/// Run the CLI on explicit arguments; returns the process exit code.
/// Each invocation gets its own scoped worker pool, so this is safe to
/// call repeatedly in one process.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit 0
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(workers) = cli.workers {
            builder = builder.num_threads(workers.max(1));
        }
        match builder.build() {
            Ok(pool) => pool,
            Err(e) => {
                eprintln!("error: cannot build worker pool: {e}");
                return 1;
            }
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
