//! `kdvlab` batch front end.
//!
//! Exit status: 0 when every check passes, 2 for a rejected configuration,
//! 3 when a numerical routine fails or a check is false, 1 for i/o errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::error::{CliError, EXIT_CHECK};

#[derive(Debug, Parser)]
#[command(name = "kdvlab", version, about = "Batch runs for dissipative KdV-type equations")]
struct Args {
    /// solve, evolve, verify-lemmas, inflate, norms or threshold
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed for randomized trials; overrides `seed` in the config
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Versions {
    kdvlab: &'static str,
    cli: &'static str,
}

#[derive(Serialize)]
struct Manifest {
    command: &'static str,
    status: &'static str,
    error: Option<String>,
    config_path: String,
    config: Option<toml::Table>,
    seed: u64,
    jobs: Option<usize>,
    versions: Versions,
    checks: BTreeMap<String, bool>,
    artifacts: Vec<String>,
    started_unix: f64,
    wall_time_s: f64,
}

const DEFAULT_OUTPUT: &str = "kdvlab-out";
const DEFAULT_SEED: u64 = 42;

fn main() -> ExitCode {
    let args = Args::parse();
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
    let clock = Instant::now();

    let loaded = RunConfig::load(&args.config, args.command);
    let out = args
        .output
        .clone()
        .or_else(|| loaded.as_ref().ok().and_then(|c| c.output.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let seed = args
        .seed
        .or_else(|| loaded.as_ref().ok().and_then(|c| c.seed))
        .unwrap_or(DEFAULT_SEED);

    let result = loaded.and_then(|cfg| {
        if let Some(n) = args.jobs {
            if n == 0 {
                return Err(config::bad("--jobs", "must be at least 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        std::fs::create_dir_all(&out)?;
        let outcome = commands::run(args.command, &cfg, seed, &out);
        Ok((cfg, outcome))
    });

    let (echo, outcome) = match result {
        Ok((cfg, outcome)) => (Some(cfg.echo), outcome),
        Err(e) => (None, Err(e)),
    };
    let (status, error, checks, artifacts, code) = match outcome {
        Ok(o) => {
            let failed: Vec<&String> = o.checks.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k).collect();
            if failed.is_empty() {
                ("ok", None, o.checks, o.artifacts, 0)
            } else {
                let msg = format!("checks failed: {}", failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "));
                ("check_failed", Some(msg), o.checks, o.artifacts, EXIT_CHECK)
            }
        }
        Err(e) => ("error", Some(e.to_string()), BTreeMap::new(), Vec::new(), e.exit_code()),
    };
    if let Some(msg) = &error {
        eprintln!("kdvlab {}: {msg}", args.command.name());
    }

    let manifest = Manifest {
        command: args.command.name(),
        status,
        error,
        config_path: args.config.display().to_string(),
        config: echo,
        seed,
        jobs: args.jobs,
        versions: Versions {
            kdvlab: kdvlab::VERSION,
            cli: env!("CARGO_PKG_VERSION"),
        },
        checks,
        artifacts,
        started_unix: started,
        wall_time_s: clock.elapsed().as_secs_f64(),
    };
    let written = std::fs::create_dir_all(&out)
        .map_err(kdvlab::Error::from)
        .and_then(|_| kdvlab::io::write_json(&out.join("manifest.json"), &manifest));
    if let Err(e) = written {
        eprintln!("kdvlab: cannot write manifest: {e}");
        return ExitCode::from(if code == 0 { 1 } else { code as u8 });
    }
    ExitCode::from(code as u8)
}
