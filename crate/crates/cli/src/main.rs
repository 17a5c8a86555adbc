//! `cylbill`: command-line front end for cylindric billiard tables.
//!
//! Exit codes: 0 success, 2 validation failure, 3 input error, 4 singular
//! orbit. Failures print a JSON diagnostic on stderr.

mod commands;
mod failure;
mod output;
mod scenario;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use failure::Failure;
use output::Sink;

#[derive(Parser)]
#[command(name = "cylbill", version, about = "Cylindric billiards on flat tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the table and decide transitivity of its base spaces.
    Analyze(Common),
    /// Run the flow and dump the collision events.
    Simulate(Common),
    /// Track Q along a segment for a normal vector.
    Qmonitor(Common),
    /// Neutral space and sufficiency verdict of one segment.
    Sufficiency(Common),
    /// Finite-time Lyapunov spectrum.
    Lyapunov(Common),
    /// Sufficiency statistics over random starts.
    Survey(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel commands (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> Result<serde_json::Value, Failure> {
    let (common, cmd): (&Common, fn(&scenario::Loaded, &mut Sink) -> _) = match &cli.command {
        Command::Analyze(c) => (c, commands::analyze),
        Command::Simulate(c) => (c, commands::simulate),
        Command::Qmonitor(c) => (c, commands::qmonitor),
        Command::Sufficiency(c) => (c, commands::sufficiency_cmd),
        Command::Lyapunov(c) => (c, commands::lyapunov),
        Command::Survey(c) => (c, commands::survey),
    };
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::input(e.to_string(), Some("threads".into())))?;
    }
    let loaded = scenario::load(&common.scenario, common.seed)?;
    let mut sink = Sink::new(&common.out, &loaded.sha256)?;
    let report = cmd(&loaded, &mut sink)?;
    let files: Vec<String> = sink.written.iter().map(|p| p.display().to_string()).collect();
    Ok(sink.stamp(serde_json::json!({ "result": report, "files": files })))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(failure::EXIT_INPUT as u8);
        }
    };
    match run(cli) {
        Ok(report) => {
            // A closed stdout (e.g. piped into `head`) is not an error here.
            let text = serde_json::to_string_pretty(&report).expect("JSON values serialize");
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let text = serde_json::to_string_pretty(&f.to_json()).expect("JSON values serialize");
            let _ = writeln!(std::io::stderr(), "{text}");
            ExitCode::from(f.code as u8)
        }
    }
}
