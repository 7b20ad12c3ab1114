// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! `onlinecolor`: experiment runner for the online edge colorers.

mod commands;
mod config;
mod exit;
mod experiment;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "onlinecolor", version, about = "Online edge-coloring experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed and repetition of a config; writes results.csv.
    Run(Common),
    /// Run a config once per value of its `sweep` axis; adds summary.csv.
    Sweep(Common),
    /// Enumerate every random branch on a small instance; prints JSON.
    Enumerate(Common),
    /// Check an assignment file against an instance.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config field by dotted path, e.g. `--set params.eps=0.2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Worker threads for independent runs.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-run wall times to timings.csv.
    #[arg(long)]
    timings: bool,
}

impl Common {
    fn options(&self) -> commands::Options {
        commands::Options {
            out: self.out.clone(),
            jobs: self
                .jobs
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
                .max(1),
            timings: self.timings,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(c) => config::load_raw(c.config.as_deref(), &c.sets)
            .and_then(|raw| commands::cmd_run(raw, &c.options())),
        Command::Sweep(c) => config::load_raw(c.config.as_deref(), &c.sets)
            .and_then(|raw| commands::cmd_sweep(raw, &c.options())),
        Command::Enumerate(c) => config::load_raw(c.config.as_deref(), &c.sets)
            .and_then(|raw| commands::cmd_enumerate(raw, &c.options())),
        Command::Validate(c) => config::load_raw(c.config.as_deref(), &c.sets)
            .and_then(commands::cmd_validate),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
