//! Command-line front end: run scenario files, list the example gallery.
//!
//! Exit codes: 0 all checks pass, 1 a check failed or hit a geometric
//! error, 2 the scenario or invocation is invalid.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use moebius_check::checks::{run_scenario, summary_line};
use moebius_check::scenario::{RunOptions, Scenario};
use moebius_geom::gallery::{ExampleId, ExampleSpec};

#[derive(Parser)]
#[command(name = "moebius-check", version, about = "Certify Moebius-geometric structure numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print a JSON report.
    Run {
        /// Path to the scenario JSON file.
        scenario: PathBuf,
        /// Multiply all upper-bound tolerances by this factor.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Override the seed of a random transform.
        #[arg(long)]
        seed: Option<u64>,
        /// Omit the timestamp and wall-clock fields for byte-stable output.
        #[arg(long)]
        no_timestamp: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in examples.
    ListExamples {
        /// Emit the list as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch() -> Result<bool, String> {
    match Cli::parse().command {
        Command::Run { scenario, tol_scale, seed, no_timestamp, out } => {
            let text = std::fs::read_to_string(&scenario)
                .map_err(|e| format!("cannot read {}: {e}", scenario.display()))?;
            let sc: Scenario = serde_json::from_str(&text)
                .map_err(|e| format!("cannot parse {}: {e}", scenario.display()))?;
            let opts = RunOptions { tol_scale, seed, with_time: !no_timestamp };
            let report = run_scenario(&sc, &opts)?;
            for check in &report.checks {
                eprintln!("{}", summary_line(check));
            }
            let json = report.to_json();
            match &out {
                Some(path) => std::fs::write(path, &json)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => emit_stdout(&json)?,
            }
            Ok(report.pass)
        }
        Command::ListExamples { json } => {
            emit_stdout(&render_examples(json))?;
            Ok(true)
        }
    }
}

/// Write to stdout, treating a closed pipe as a normal early exit.
fn emit_stdout(text: &str) -> Result<(), String> {
    use std::io::{ErrorKind, Write};
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(format!("cannot write to stdout: {e}")),
    }
}

#[derive(Serialize)]
struct ExampleRow {
    id: &'static str,
    n: usize,
    takes_theta: bool,
    window: Vec<(f64, f64)>,
}

fn render_examples(as_json: bool) -> String {
    let rows: Vec<ExampleRow> = ExampleId::ALL
        .iter()
        .map(|id| {
            let spec = ExampleSpec::new(*id);
            ExampleRow {
                id: id.as_str(),
                n: spec.n,
                takes_theta: *id == ExampleId::MinimalCylinder,
                window: spec.default_window(),
            }
        })
        .collect();
    if as_json {
        let mut out = serde_json::to_string_pretty(&rows).expect("rows serialize");
        out.push('\n');
        return out;
    }
    let mut out = String::new();
    for row in rows {
        let theta = if row.takes_theta { ", theta" } else { "" };
        out.push_str(&format!("{:<18} n = {}{}\n", row.id, row.n, theta));
    }
    out
}
