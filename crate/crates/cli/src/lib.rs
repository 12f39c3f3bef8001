//! Command-line frontend for `residuum`.

pub mod commands;
pub mod config;
pub mod report;

use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "residuum", version, about = "Structure of Z mod p^k: core, p-th powers, sums of p-th powers")]
pub struct Cli {
    #[command(flatten)]
    pub global: config::GlobalArgs,

    #[command(subcommand)]
    pub command: commands::Command,
}
