//! `qfa`: build, convert, verify and analyze quantum finite automata from
//! the command line.
//!
//! Exit codes: `0` success with every check verified, `1` a verification
//! failed, `2` usage or input error.

mod args;
mod commands;
mod context;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use context::Context;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = Context::from_cli(&cli).and_then(|ctx| match &cli.command {
        Command::Witness(a) => commands::witness(&ctx, a),
        Command::Pipeline(a) => commands::pipeline(&ctx, a),
        Command::Analyze(a) => commands::analyze(&ctx, a),
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Linearize(a) => commands::linearize(&ctx, a),
        Command::Stochasticize(a) => commands::stochasticize(&ctx, a),
        Command::Signmatrix(a) => commands::signmatrix(&ctx, a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
