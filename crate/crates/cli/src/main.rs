use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use slrsm::cache::TableCache;
use slrsm::config::{resolve_cache_dir, LoadedConfig, CACHE_ENV};
use slrsm::output::{comparison_table, sig, write_run};
use slrsm::pipeline::{execute, oracle_zeros, RunOptions};

#[derive(Parser)]
#[command(
    name = "slrsm",
    version,
    about = "Eigenvalues of Sturm-Liouville problems with transmission conditions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write results to the output directory.
    Run { config: PathBuf },
    /// Reference zeros by direct shooting.
    Oracle { config: PathBuf },
    /// Print the oracle/RSM comparison table.
    Table { config: PathBuf },
    /// Manage the sample-table cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Delete all cached sample tables.
    Clear {
        /// Cache directory (default: $SLRSM_CACHE_DIR, else ./.slrsm-cache).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn env_cache() -> Option<String> {
    std::env::var(CACHE_ENV).ok()
}

fn options(loaded: &LoadedConfig, eigenfunctions: bool, force_oracle: bool) -> RunOptions {
    RunOptions {
        cache_dir: loaded.cache_dir(env_cache().as_deref()),
        eigenfunctions,
        force_oracle,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config } => {
            let loaded = LoadedConfig::load(&config)?;
            let outcome = execute(&loaded, &options(&loaded, true, false))?;
            let dir = loaded.output_dir();
            write_run(&dir, &outcome.report, &outcome.eigenpairs)
                .with_context(|| format!("writing results to {}", dir.display()))?;
            let r = &outcome.report;
            println!(
                "{} roots in [0, {}]{}; results in {}",
                r.roots.len(),
                sig(r.scan.mu_max),
                if r.timings.cache_hit {
                    " (cached sample table)"
                } else {
                    ""
                },
                dir.display()
            );
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Oracle { config } => {
            let loaded = LoadedConfig::load(&config)?;
            let oracle = oracle_zeros(&loaded)?;
            println!("{:<6} {:<20} {:<20}", "Index", "mu", "eigenvalue");
            for (k, mu) in oracle.zeros.iter().enumerate() {
                println!("{:<6} {:<20} {:<20}", k + 1, sig(*mu), sig(mu * mu));
            }
        }
        Command::Table { config } => {
            let loaded = LoadedConfig::load(&config)?;
            let outcome = execute(&loaded, &options(&loaded, false, true))?;
            print!("{}", comparison_table(&outcome.report));
        }
        Command::Cache {
            action: CacheAction::Clear { dir },
        } => {
            let dir = match dir {
                Some(d) => d,
                None => resolve_cache_dir(&std::env::current_dir()?, None, env_cache().as_deref()),
            };
            let removed = TableCache::new(&dir)
                .clear()
                .with_context(|| format!("clearing {}", dir.display()))?;
            println!("removed {removed} cached table(s) from {}", dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
