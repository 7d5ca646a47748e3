use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ldg_cli::{cmd_coercivity, cmd_minimize, cmd_sweep, cmd_verify, Outcome, RunConfig, Status};

#[derive(Parser)]
#[command(name = "ldg", version, about = "Landau-de Gennes verification suites and relaxation runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Identity, bulk-calculus and projection suites.
    Verify(Common),
    /// Condition (L), α estimate and the non-coercivity witness.
    Coercivity(Common),
    /// One relaxation at solver.l; writes field.ldgq.
    Minimize(Common),
    /// Warm-started relaxations over solver.l_list; writes sweep.csv.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides sampling.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> ldg_cli::Result<bool> {
    let (Command::Verify(common) | Command::Coercivity(common) | Command::Minimize(common) | Command::Sweep(common)) =
        &cli.command;
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.sampling.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output.dir = out.clone();
    }
    let outcome = match cli.command {
        Command::Verify(_) => Outcome { record: cmd_verify(&cfg)?, csv: None, snapshot: None },
        Command::Coercivity(_) => Outcome { record: cmd_coercivity(&cfg)?, csv: None, snapshot: None },
        Command::Minimize(_) => cmd_minimize(&cfg)?,
        Command::Sweep(_) => cmd_sweep(&cfg)?,
    };
    outcome.write_to(&cfg.output.dir)?;

    let rec = &outcome.record;
    for w in &rec.warnings {
        eprintln!("warning: {w}");
    }
    for c in &rec.checks {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
            Status::Undefined => "undefined",
        };
        let value = match (c.measured, c.threshold) {
            (Some(m), Some(t)) => format!("  {m:.3e} (threshold {t:.3e})"),
            _ => String::new(),
        };
        let note = if c.note.is_empty() { String::new() } else { format!("  {}", c.note) };
        println!("{status:>9}  {}{value}{note}", c.name);
    }
    println!("record written to {}", cfg.output.dir.join("record.json").display());
    Ok(rec.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
