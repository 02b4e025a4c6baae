//! Command-line front end for the `coinwalk` library.
//!
//! Every command writes a CSV data file at `--out` and a JSON sidecar at
//! `<out>.meta.json` holding the resolved configuration. `replay` rebuilds
//! the run from the sidecar alone.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

use crate::args::{Cli, Command, WalkArgs};
use crate::config::WalkConfig;
use crate::error::CliError;
use crate::output::{CommandRecord, Metadata};

pub use crate::args::parse_start;

fn warn_unused_seed(walk: &WalkArgs) {
    if walk.seed.is_some() {
        log::warn!("--seed only affects the trajectory command");
    }
}

fn dispatch(cli: Cli) -> Result<commands::Report, CliError> {
    match cli.command {
        Command::Run(a) => {
            warn_unused_seed(&a.walk);
            let config = WalkConfig::from_args(&a.walk)?;
            commands::execute(&CommandRecord::Run {}, &config, &a.walk.out, a.walk.jobs)
        }
        Command::Sweep(a) => {
            warn_unused_seed(&a.walk);
            let config = WalkConfig::from_args(&a.walk)?;
            let betas = match a.betas {
                Some(list) => commands::normalize_betas(list)?,
                None => commands::beta_grid(a.grid)?,
            };
            commands::execute(
                &CommandRecord::Sweep { betas },
                &config,
                &a.walk.out,
                a.walk.jobs,
            )
        }
        Command::Mix(a) => {
            warn_unused_seed(&a.walk);
            let config = WalkConfig::from_args(&a.walk)?;
            let cmd = CommandRecord::Mix { epsilon: a.epsilon };
            commands::execute(&cmd, &config, &a.walk.out, a.walk.jobs)
        }
        Command::Trajectory(a) => {
            let config = WalkConfig::from_args(&a.walk)?;
            let seed = a.walk.seed.unwrap_or_else(rand::random);
            let cmd = CommandRecord::Trajectory {
                samples: a.samples,
                seed,
            };
            commands::execute(&cmd, &config, &a.walk.out, a.walk.jobs)
        }
        Command::Replay(a) => {
            let text = std::fs::read_to_string(&a.meta)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", a.meta.display())))?;
            let meta: Metadata = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", a.meta.display())))?;
            if meta.library_version != coinwalk::VERSION {
                log::warn!(
                    "metadata was written by library version {}, running {}",
                    meta.library_version,
                    coinwalk::VERSION
                );
            }
            commands::execute(&meta.command, &meta.config, &a.out, a.jobs)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = dispatch(cli).and_then(|report| {
        let paths: Vec<String> = report
            .outputs
            .paths()
            .map(|p| p.display().to_string())
            .collect();
        report.outputs.commit()?;
        for line in report.summary {
            println!("{line}");
        }
        for p in paths {
            println!("wrote {p}");
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("coinwalk: {e}");
            e.exit_code()
        }
    }
}
