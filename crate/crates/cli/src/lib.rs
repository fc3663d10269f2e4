//! Command-line front end: loads a TOML configuration, runs one scenario and
//! writes a JSON report plus CSV tables.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::{Config, ConfigError};
use output::Outcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hg", version, about = "Morrey, Stummel, maximal and BMO diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for JSON and CSV results
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Dimension
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Exponent α
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Integrability exponent p
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Refinement factor applied to every grid
    #[arg(long, global = true)]
    pub grid_refine: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Morrey norm of a field against a growth function
    MorreyNorm,
    /// Stummel modulus curve and class of a potential
    Stummel,
    /// Growth-function conditions on a grid
    CheckPhi,
    /// Maximal function, A1 constants and the maximal Morrey bound
    Maximal,
    /// BMO seminorm on a ball
    Bmo,
    /// Fefferman-type inequalities over a test-function catalog
    Fefferman,
    /// Normalized two-point kernel integrals
    KernelLemma,
    /// Pointwise Riesz potential bound
    RieszBound,
    /// Subrepresentation by the gradient potential
    Subrep,
    /// Full verification of the explicit counterexample pair
    Counterexample,
    /// Vanishing order of ball averages near a point
    Vanishing,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::MorreyNorm => "morrey-norm",
            Command::Stummel => "stummel",
            Command::CheckPhi => "check-phi",
            Command::Maximal => "maximal",
            Command::Bmo => "bmo",
            Command::Fefferman => "fefferman",
            Command::KernelLemma => "kernel-lemma",
            Command::RieszBound => "riesz-bound",
            Command::Subrep => "subrep",
            Command::Counterexample => "counterexample",
            Command::Vanishing => "vanishing",
        }
    }

    pub fn run(self, cfg: &Config) -> anyhow::Result<Outcome> {
        match self {
            Command::MorreyNorm => commands::morrey(cfg),
            Command::Stummel => commands::stummel(cfg),
            Command::CheckPhi => commands::check_phi(cfg),
            Command::Maximal => commands::maximal(cfg),
            Command::Bmo => commands::bmo(cfg),
            Command::Fefferman => commands::fefferman(cfg),
            Command::KernelLemma => commands::kernel_lemma(cfg),
            Command::RieszBound => commands::riesz_bound(cfg),
            Command::Subrep => commands::subrep(cfg),
            Command::Counterexample => commands::counterexample(cfg),
            Command::Vanishing => commands::vanishing(cfg),
        }
    }
}

/// The configuration file with command-line overrides applied, validated.
pub fn resolve(cli: &Cli) -> Result<Config, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(a) = cli.alpha {
        cfg.alpha = a;
    }
    if let Some(p) = cli.p {
        cfg.p = p;
    }
    if let Some(t) = cli.tol {
        cfg.tol = Some(t);
    }
    if let Some(g) = cli.grid_refine {
        cfg.grid_refine = g;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    use hg_core::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::ParameterOutOfRange(_) | E::DimensionMismatch { .. } | E::InvalidField(_) | E::Config(_)) => {
            EXIT_CONFIG
        }
        Some(E::PairTooClose(_)) => EXIT_CONFIG,
        _ => EXIT_INCONCLUSIVE,
    }
}

fn init_threads() {
    if let Some(k) = std::env::var("HG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|k| *k > 0) {
        // a second initialization in the same process is harmless to ignore
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
}

pub fn run_cli(cli: Cli) -> i32 {
    init_threads();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let name = cli.command.name();
    let outcome = match cli.command.run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {name}: {e}");
            return exit_code_for(&e);
        }
    };
    for line in &outcome.summary {
        println!("{line}");
    }
    match output::write(&cli.out, name, &cfg, &outcome) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_INCONCLUSIVE;
        }
    }
    if outcome.inconclusive {
        eprintln!("warning: {name}: some quantities are inconclusive");
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

pub fn run() -> i32 {
    run_cli(Cli::parse())
}
