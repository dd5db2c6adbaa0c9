//! `qslbound`: entropy tables, bound and speed-limit scans, figure grids and verification.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use qslbound::bounds::GConvention;
use qslbound::evolution::Quadrature;
use qslbound::parallel::Execution;
use qslbound::scan::commands::{self, Outcome};
use qslbound::scan::config::{self, ConfigError, FiguresConfig, Overrides, ScenarioConfig, VerifyConfig};
use qslbound::scan::figures;
use qslbound::scan::output::{write_json, write_table, RunInfo, Table};
use qslbound::scan::verify::Verifier;

const EXIT_OK: u8 = 0;
const EXIT_INVARIANT: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Convention {
    Appendix,
    Maintext,
}

impl From<Convention> for GConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Appendix => GConvention::Appendix,
            Convention::Maintext => GConvention::MainText,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qslbound",
    version,
    about = "Relative-entropy bounds and quantum speed limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration; optional for `figures` and `verify`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Propagation steps, replacing the configured value.
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true, value_enum)]
    convention: Option<Convention>,
    /// Ensemble seed for `verify`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Rényi, Tsallis, relative and min-relative entropies on the configured grid.
    Entropies,
    /// Every bound variant with slack, prefactor and flags, plus merit tables.
    Bounds,
    /// Speed-limit times for every family.
    Qsl,
    /// Figure grids with closed-form companions.
    Figures,
    /// Seeded invariant sweeps.
    Verify,
}

enum Failure {
    Config(String),
    Invariant(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<qslbound::Error> for Failure {
    fn from(e: qslbound::Error) -> Self {
        Failure::Invariant(e.to_string())
    }
}

fn io_failure(dir: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Config(format!("{}: cannot write output: {e}", dir.display()))
}

fn write_all(dir: &Path, tables: &[Table], run: &RunInfo) -> Result<(), Failure> {
    for t in tables {
        let path = write_table(dir, t, run).map_err(io_failure(dir))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn scenario_command(cli: &Cli, overrides: &Overrides, exec: Execution) -> Result<bool, Failure> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::Config("--config is required for this command".into()))?;
    let scenario = config::load::<ScenarioConfig>(path)?.resolve(overrides)?;
    let (name, outcome): (&str, Outcome) = match cli.command {
        Command::Entropies => ("entropies", commands::entropies(&scenario, exec)?),
        Command::Bounds => ("bounds", commands::bounds(&scenario, exec)?),
        _ => ("qsl", commands::qsl(&scenario, exec)?),
    };
    let run = RunInfo::new(name, scenario.convention, scenario.steps, scenario.quadrature);
    write_all(&cli.out, &outcome.tables, &run)?;
    if outcome.checked > 0 {
        println!("{name}: {} checked, {} violations", outcome.checked, outcome.violations);
    }
    Ok(outcome.passed())
}

fn figures_command(cli: &Cli, overrides: &Overrides, exec: Execution) -> Result<bool, Failure> {
    let cfg = match &cli.config {
        Some(path) => config::load::<FiguresConfig>(path)?,
        None => FiguresConfig::default(),
    }
    .apply(overrides)?;
    let mut passed = true;
    for &name in &cfg.figures {
        let start = Instant::now();
        let out = figures::figure(name, &cfg, exec)?;
        let run = RunInfo::new(name.name(), cfg.convention, out.layout.steps, Quadrature::Simpson);
        write_all(&cli.out, &out.tables, &run)?;
        println!(
            "{}: numeric {}/{} valid, closed {}/{} valid, {:.2} s",
            name.name(),
            out.numeric.checked - out.numeric.violations,
            out.numeric.checked,
            out.closed.checked - out.closed.violations,
            out.closed.checked,
            start.elapsed().as_secs_f64()
        );
        passed &= out.passed();
    }
    Ok(passed)
}

fn verify_command(cli: &Cli, overrides: &Overrides, exec: Execution) -> Result<bool, Failure> {
    let cfg = match &cli.config {
        Some(path) => config::load::<VerifyConfig>(path)?,
        None => VerifyConfig::default(),
    }
    .apply(overrides)?;
    let start = Instant::now();
    let report = Verifier::new(&cfg, exec).run()?;
    let mut run = RunInfo::new("verify", GConvention::default(), cfg.steps, Quadrature::Simpson);
    run.seed = Some(cfg.seed);
    write_all(&cli.out, &[report.table()], &run)?;
    let path = write_json(&cli.out, "verify", &report).map_err(io_failure(&cli.out))?;
    println!("wrote {}", path.display());
    for c in &report.checks {
        let status = if c.passed() { "pass" } else { "FAIL" };
        println!(
            "{status} {:<24} {:>9} checks, worst margin {:.3e}",
            c.name, c.checks, c.worst_margin
        );
        if let Some(f) = &c.first_failure {
            println!("     first failure: {f}");
        }
    }
    eprintln!("verify: {:.2} s", start.elapsed().as_secs_f64());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        steps: cli.steps,
        convention: cli.convention.map(Into::into),
        seed: cli.seed,
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let result = match cli.command {
        Command::Entropies | Command::Bounds | Command::Qsl => scenario_command(&cli, &overrides, exec),
        Command::Figures => figures_command(&cli, &overrides, exec),
        Command::Verify => verify_command(&cli, &overrides, exec),
    };
    match result {
        Ok(true) => ExitCode::from(EXIT_OK),
        Ok(false) => {
            eprintln!("error: invariant violations found");
            ExitCode::from(EXIT_INVARIANT)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVARIANT)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
