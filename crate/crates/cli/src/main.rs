//! Command-line front end for the `pathnoise` library.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pathnoise::Error;

use crate::config::Knobs;

#[derive(Parser)]
#[command(name = "pathnoise", version, about = "Pathwise randomness and band-limited noise separation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral minimum and normalized randomness ratio of a two-sided sequence
    Analyze(Knobs),
    /// Split the spectrum into a predictable part and constant-modulus noise
    Decompose2(Knobs),
    /// Estimate one missing sample from all others
    Recover(Knobs),
    /// Project a one-sided sequence onto a left-band-limited class
    Project(Knobs),
    /// Estimate the spectral support arc from the deep past
    EstimateBand(Knobs),
    /// Predict future samples with an estimated band
    Predict(Knobs),
    /// Peel band-limited components off a one-sided sequence
    Multistep(Knobs),
}

fn classify(e: &Error) -> (u8, &'static str) {
    match e {
        Error::InvalidInput(_) | Error::NonFinite { .. } => (2, "validation"),
        Error::Parse { .. } => (2, "parse"),
        Error::Io(_) => (2, "io"),
        Error::Factorization(_) => (3, "factorization"),
        Error::AmbiguousBand(_) => (4, "ambiguous"),
    }
}

fn fail(code: u8, kind: &str, msg: &str) -> ExitCode {
    let msg = msg.lines().next().unwrap_or("").replace('\\', "\\\\").replace('"', "\\\"");
    eprintln!("error code={code} kind={kind} msg=\"{msg}\"");
    ExitCode::from(code)
}

fn run(command: Command) -> Result<commands::Output, Error> {
    let (knobs, run): (Knobs, fn(&Knobs) -> pathnoise::Result<commands::Output>) = match command {
        Command::Analyze(k) => (k, commands::analyze),
        Command::Decompose2(k) => (k, commands::decompose2),
        Command::Recover(k) => (k, commands::recover),
        Command::Project(k) => (k, commands::project),
        Command::EstimateBand(k) => (k, commands::estimate),
        Command::Predict(k) => (k, commands::predict),
        Command::Multistep(k) => (k, commands::multistep),
    };
    let knobs = knobs.resolve()?;
    if let Some(n) = knobs.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("cannot configure {n} threads: {e}")))?;
    }
    let mut output = run(&knobs)?;
    output.emit(knobs.out.as_deref())?;
    match output.error.take() {
        Some(e) => Err(e),
        None => Ok(output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let msg = text.trim_start_matches("error: ");
            return fail(2, "usage", msg);
        }
    };
    match run(cli.command) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, kind) = classify(&e);
            fail(code, kind, &e.to_string())
        }
    }
}
