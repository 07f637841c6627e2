//! Command-line driver: the four stationary-distribution experiments, the
//! verification suite, reachability plans and config-driven simulation.
//!
//! Every CSV starts with `#` comment lines echoing the parameters, the master
//! seed and an `args:` line that reproduces the file when passed back to the
//! same subcommand.

pub mod args;
pub mod commands;

use std::io::Write;

use anyhow::Result;

pub use args::{Cli, Command};
pub use commands::RunOutcome;

/// Runs a parsed command, writing progress and summaries to `log`.
pub fn run(cli: &Cli, log: &mut dyn Write) -> Result<RunOutcome> {
    let threads = args::threads_from_env()?;
    match &cli.command {
        Command::DensityRho(a) => commands::density_rho(a, threads, log),
        Command::DensityK(a) => commands::density_k(a, threads, log),
        Command::BiasScan(a) => commands::bias_scan(a, threads, log),
        Command::KScan(a) => commands::k_scan(a, threads, log),
        Command::Verify(a) => commands::verify(a, threads, log),
        Command::Reach(a) => commands::reach(a, log),
        Command::Simulate(a) => commands::simulate(a, threads, log),
    }
}
