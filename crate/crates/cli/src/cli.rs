use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use multact_core::averages::DEFAULT_SEED;
use multact_core::numtheory::{install_table, FactorTable};
use multact_core::par;

use crate::config::ExperimentConfig;
use crate::error::LabError;
use crate::registry::{lookup, registry, Ctx};

#[derive(Debug, Parser)]
#[command(
    name = "multact-lab",
    version,
    about = "Run multact-core experiments from JSON configs"
)]
pub struct Cli {
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory (default `results`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Factor table written by `sieve`, installed before the run.
        #[arg(long)]
        sieve_cache: Option<PathBuf>,
    },
    /// List registered experiments.
    List {
        /// Also print each experiment's default `params`.
        #[arg(long)]
        defaults: bool,
    },
    /// Build a smallest-prime-factor table and write it to disk.
    Sieve {
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        sieve_cache: PathBuf,
    },
}

pub fn execute(cli: Cli) -> Result<(), LabError> {
    match cli.command {
        Command::List { defaults } => {
            for e in registry() {
                println!("{:<34} {}", e.name, e.about);
                if defaults {
                    println!("    {}", serde_json::to_string(&(e.defaults)())?);
                }
            }
            Ok(())
        }
        Command::Sieve { limit, sieve_cache } => {
            let t0 = Instant::now();
            let table = FactorTable::build(limit)?;
            table.write_cache(&sieve_cache)?;
            println!(
                "sieve: {} primes up to {} written to {} in {:.2}s",
                table.primes().len(),
                table.limit(),
                sieve_cache.display(),
                t0.elapsed().as_secs_f64()
            );
            Ok(())
        }
        Command::Run { config, sieve_cache } => {
            let cfg = ExperimentConfig::load(&config)?;
            let opts = RunOptions {
                seed: cli.seed,
                threads: cli.threads,
                out: cli.out,
                sieve_cache,
            };
            let summary = run_config(&cfg, &opts)?;
            println!("{summary}");
            Ok(())
        }
    }
}

#[derive(Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub sieve_cache: Option<PathBuf>,
}

/// Validates, runs and writes `<out>/<experiment>.{csv,json}`. Returns a one-line summary.
pub fn run_config(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<String, LabError> {
    let entry = lookup(&cfg.experiment)?;
    let prepared = (entry.prepare)(&cfg.params)?;
    let seed = opts.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let threads = opts.threads.or(cfg.threads);
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    let sieve_cache = opts.sieve_cache.clone().or_else(|| cfg.sieve_cache.clone());

    let resolved = json!({
        "experiment": entry.name,
        "seed": seed,
        "params": prepared.resolved,
    });
    let hash = hex::encode(Sha256::digest(serde_json::to_vec(&resolved)?));

    if let Some(k) = threads {
        par::init_global_threads(k);
    }
    if let Some(path) = &sieve_cache {
        install_table(FactorTable::read_cache(path)?);
    }

    let ctx = Ctx { seed };
    let t0 = Instant::now();
    let report = (prepared.run)(&ctx)?;
    let wall = t0.elapsed().as_secs_f64();

    std::fs::create_dir_all(&out).map_err(|e| LabError::io(out.display().to_string(), e))?;
    let csv_path = out.join(format!("{}.csv", entry.name));
    report.table.write(&csv_path)?;
    let all_passed = report.passes.values().all(|&b| b);
    let summary = json!({
        "experiment": entry.name,
        "version": {
            "multact-lab": env!("CARGO_PKG_VERSION"),
            "multact-core": multact_core::VERSION,
        },
        "config": resolved,
        "config_sha256": hash,
        "seed": seed,
        "threads": par::current_threads(),
        "parallel": par::is_parallel(),
        "sieve_cache": sieve_cache,
        "wall_clock_seconds": wall,
        "rows": report.table.rows.len(),
        "counts": report.counts,
        "metrics": report.metrics,
        "passes": report.passes,
        "all_passed": all_passed,
        "notes": report.notes,
    });
    let json_path = out.join(format!("{}.json", entry.name));
    write_json(&json_path, &summary)?;

    let failed: Vec<&str> = report
        .passes
        .iter()
        .filter(|(_, &ok)| !ok)
        .map(|(k, _)| k.as_str())
        .collect();
    let status = if failed.is_empty() {
        format!("{} checks passed", report.passes.len())
    } else {
        format!("failed checks: {}", failed.join(", "))
    };
    Ok(format!(
        "{}: {} rows -> {} ({status}, {wall:.2}s)",
        entry.name,
        report.table.rows.len(),
        csv_path.display()
    ))
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<(), LabError> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| LabError::io(path.display().to_string(), e))
}
