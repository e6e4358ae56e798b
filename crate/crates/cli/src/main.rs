//! `dropkit` command-line front end.
//!
//! Every run prints its result on stdout and exactly one JSON manifest line
//! on stderr. Exit codes: 0 success, 1 check failure, 2 bad parameters,
//! 3 unsupported regime.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod grid;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use sha2::{Digest, Sha256};

use args::Cli;
use output::{CliError, Rendered};

#[derive(Serialize)]
struct RunManifest {
    command: String,
    params: serde_json::Value,
    seed: Option<u64>,
    version: &'static str,
    wall_time_s: f64,
    output_sha256: String,
    exit_code: u8,
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let command = std::env::args().nth(1).unwrap_or_default();
            emit(command, serde_json::Value::Null, None, start, "", 2);
            return ExitCode::from(2);
        }
    };
    let command = cli.command.name().to_string();
    let params = serde_json::to_value(&cli).expect("arguments serialize");
    let seed = cli.command.seed();

    let result = configure_threads(cli.threads).and_then(|()| commands::run(&cli));
    let (body, code) = match result {
        Ok(Rendered { body, code }) => (body, code),
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            (String::new(), code)
        }
    };
    print!("{body}");
    emit(command, params, seed, start, &body, code);
    ExitCode::from(code)
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::param("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::internal(format!("thread pool: {e}")))
}

fn emit(command: String, params: serde_json::Value, seed: Option<u64>, start: Instant, body: &str, code: u8) {
    let manifest = RunManifest {
        command,
        params,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_time_s: start.elapsed().as_secs_f64(),
        output_sha256: hex::encode(Sha256::digest(body.as_bytes())),
        exit_code: code,
    };
    eprintln!(
        "{}",
        serde_json::to_string(&manifest).expect("manifest serializes")
    );
}
