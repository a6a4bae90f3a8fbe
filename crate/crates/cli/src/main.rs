//! `toroidal`: run the verification suites for one algebra kind.

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use toroidal_core::cliffspace::{AlgebraKind, Family};
use toroidal_core::suites::{run, OutputFormat, RunConfig, Suite};
use toroidal_core::Rational;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    AOdd,
    D,
    AEven,
    #[value(name = "d4-triality")]
    D4Triality,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::AOdd => Family::AOdd,
            FamilyArg::D => Family::D,
            FamilyArg::AEven => Family::AEven,
            FamilyArg::D4Triality => Family::D4Triality,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "toroidal",
    version,
    about = "Exact relation checks for twisted toroidal Lie algebras"
)]
struct Args {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Rank parameter n (the d4-triality family only has n = 2).
    #[arg(long)]
    n: usize,
    /// Comma-separated subset of symbolic-mry, serre, fock, psi, axioms.
    #[arg(long, value_delimiter = ',')]
    suites: Option<Vec<String>>,
    /// Highest Fock-state energy, as an integer or p/q.
    #[arg(long, default_value = "4")]
    fock_energy: String,
    #[arg(long, default_value_t = 2)]
    mode_bound: i64,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Report every time as 0 so repeated runs are byte-identical.
    #[arg(long)]
    no_timings: bool,
}

fn config(args: &Args) -> Result<RunConfig> {
    let kind = AlgebraKind::new(args.family.into(), args.n)?;
    let mut config = RunConfig::new(kind);
    if let Some(names) = &args.suites {
        config.suites = names
            .iter()
            .map(|s| s.trim().parse::<Suite>())
            .collect::<Result<_, _>>()?;
    }
    config.fock_energy = args
        .fock_energy
        .parse::<Rational>()
        .with_context(|| format!("invalid --fock-energy `{}`", args.fock_energy))?;
    config.mode_bound = args.mode_bound;
    config.format = match args.format {
        FormatArg::Text => OutputFormat::Text,
        FormatArg::Json => OutputFormat::Json,
    };
    config.seed = args.seed;
    config.timings = !args.no_timings;
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(jobs) = args.jobs {
        if let Err(e) = rayon_pool(jobs) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match config.format {
        OutputFormat::Json => println!("{}", report.to_json()),
        OutputFormat::Text => print!("{}", report.render_text()),
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn rayon_pool(jobs: usize) -> Result<()> {
    anyhow::ensure!(jobs > 0, "--jobs must be positive");
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .context("configuring the thread pool")
}
