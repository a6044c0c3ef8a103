//! parse q -> sample table (cached) -> zeros -> error estimates -> oracle
//! -> eigenfunctions -> Gram matrix.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use slrsm_core::eigen::{assemble_eigenfunction, gram_matrix, max_normalized_off_diagonal};
use slrsm_core::oracle::find_zeros_direct;
use slrsm_core::roots::{error_estimate, fit_c4, fit_grid, scan};
use slrsm_core::sampling::build_sample_table;
use slrsm_core::{Eigenpair, MethodContext, MethodRegistry, OracleResult, SampleTable};
use thiserror::Error;

use crate::cache::TableCache;
use crate::config::LoadedConfig;
use crate::hash::problem_hash;
use crate::report::{
    comparison_rows, EigenfunctionSummary, ProblemSection, RunReport, ScanSection, Timings,
    REPORT_SCHEMA_VERSION,
};

#[derive(Debug, Error)]
#[error("{phase} phase failed")]
pub struct PipelineError {
    pub phase: &'static str,
    #[source]
    pub source: slrsm_core::Error,
}

trait Phase<T> {
    fn phase(self, phase: &'static str) -> Result<T, PipelineError>;
}

impl<T> Phase<T> for slrsm_core::Result<T> {
    fn phase(self, phase: &'static str) -> Result<T, PipelineError> {
        self.map_err(|source| PipelineError { phase, source })
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub cache_dir: PathBuf,
    pub eigenfunctions: bool,
    /// Run the oracle even when the config turns it off.
    pub force_oracle: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub eigenpairs: Vec<Eigenpair>,
}

fn seconds(since: Instant) -> f64 {
    since.elapsed().as_secs_f64()
}

/// Loads the table for `hash` from the cache or builds and stores it.
fn sample_table(
    loaded: &LoadedConfig,
    cache: &TableCache,
    hash: &str,
    warnings: &mut Vec<String>,
) -> Result<(SampleTable, bool), PipelineError> {
    if let Some(table) = cache.load(hash) {
        return Ok((table, true));
    }
    let cfg = &loaded.config;
    let problem = cfg.problem().phase("problem")?;
    let sampling = cfg.sampling().phase("sampling")?;
    let table = build_sample_table(&problem, &sampling, &cfg.ivp())
        .phase("sampling")?
        .with_hash(hash);
    if let Err(e) = cache.store(&table) {
        warnings.push(format!(
            "could not write cache entry in {}: {e}",
            cache.dir().display()
        ));
    }
    Ok((table, false))
}

pub fn oracle_zeros(loaded: &LoadedConfig) -> Result<OracleResult, PipelineError> {
    let cfg = &loaded.config;
    let problem = cfg.problem().phase("problem")?;
    let mu_max = cfg.mu_max().phase("sampling")?;
    find_zeros_direct(&problem, mu_max, cfg.scan_step, cfg.tol, &cfg.oracle_ivp()).phase("oracle")
}

pub fn execute(loaded: &LoadedConfig, options: &RunOptions) -> Result<RunOutcome, PipelineError> {
    let start = Instant::now();
    let cfg = &loaded.config;
    let mut timings = Timings::default();
    let mut warnings = Vec::new();

    let problem = cfg.problem().phase("problem")?;
    let sampling = cfg.sampling().phase("sampling")?;
    let ivp = cfg.ivp();
    let oracle_ivp = cfg.oracle_ivp();
    let mu_max = cfg.mu_max().phase("sampling")?;
    let hash = problem_hash(&cfg.q, cfg.a, cfg.d, &sampling, &ivp);

    let t = Instant::now();
    let table = if cfg.method == "rsm" {
        let cache = TableCache::new(&options.cache_dir);
        let (table, hit) = sample_table(loaded, &cache, &hash, &mut warnings)?;
        timings.cache_hit = hit;
        Some(Arc::new(table))
    } else {
        None
    };
    timings.sampling = seconds(t);

    let t = Instant::now();
    let ctx = MethodContext {
        problem: &problem,
        ivp,
        table: table.clone(),
    };
    let method = MethodRegistry::default()
        .build(&cfg.method, &ctx)
        .phase("method")?;
    let mut outcome = scan(method.as_ref(), mu_max, cfg.scan_step, cfg.tol).phase("roots")?;
    timings.roots = seconds(t);

    let t = Instant::now();
    let mut c4 = None;
    if let Some(table) = &table {
        let fitted = fit_c4(
            table,
            &problem,
            &oracle_ivp,
            &fit_grid(table, cfg.fit_points),
        )
        .phase("error estimates")?;
        c4 = Some(fitted);
        let estimates: Vec<_> = outcome
            .roots
            .par_iter()
            .map(|r| error_estimate(table, cfg.a, r, fitted))
            .collect();
        for (root, est) in outcome.roots.iter_mut().zip(estimates) {
            match est {
                Ok(e) => root.error_estimate = Some(e),
                Err(e) => warnings.push(format!("no error estimate at mu = {}: {e}", root.mu)),
            }
        }
    }
    timings.error_estimates = seconds(t);

    let t = Instant::now();
    let oracle = if cfg.run_oracle || options.force_oracle {
        Some(
            find_zeros_direct(&problem, mu_max, cfg.scan_step, cfg.tol, &oracle_ivp)
                .phase("oracle")?,
        )
    } else {
        None
    };
    let rows = oracle
        .as_ref()
        .map(|o| comparison_rows(&outcome.roots, &o.zeros))
        .unwrap_or_default();
    if let Some(o) = &oracle {
        if o.zeros.len() != outcome.roots.len() {
            warnings.push(format!(
                "{} roots found but the oracle has {} zeros below mu_max",
                outcome.roots.len(),
                o.zeros.len()
            ));
        }
    }
    timings.oracle = seconds(t);

    let t = Instant::now();
    let eigenpairs = if options.eigenfunctions {
        outcome
            .roots
            .par_iter()
            .enumerate()
            .map(|(k, r)| assemble_eigenfunction(&problem, k + 1, r.mu, cfg.grid_pts, &ivp))
            .collect::<slrsm_core::Result<Vec<_>>>()
            .phase("eigenfunctions")?
    } else {
        Vec::new()
    };
    timings.eigenfunctions = seconds(t);

    let t = Instant::now();
    let gram = gram_matrix(&eigenpairs).phase("gram")?;
    let gram_max_off_diagonal = (gram.len() > 1).then(|| max_normalized_off_diagonal(&gram));
    timings.gram = seconds(t);

    let eigenfunctions = eigenpairs
        .iter()
        .map(|p| EigenfunctionSummary {
            index: p.index,
            mu: p.mu,
            alpha: p.alpha,
            l2_norm: p.l2_norm,
            transmission: p.transmission(cfg.a),
            file: format!("eigenfunction_{}.csv", p.index),
        })
        .collect();

    timings.total = seconds(start);
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        method: cfg.method.clone(),
        problem: ProblemSection {
            q: cfg.q.clone(),
            a: cfg.a,
            d: cfg.d,
            label: cfg.label.clone(),
        },
        sampling,
        ivp,
        oracle_ivp,
        scan: ScanSection {
            mu_max,
            scan_step: cfg.scan_step,
            tol: cfg.tol,
        },
        problem_hash: hash,
        c4,
        roots: outcome.roots,
        skipped_scan_points: outcome.skipped,
        touching_points: outcome.touching,
        oracle,
        table: rows,
        eigenfunctions,
        gram,
        gram_max_off_diagonal,
        warnings,
        timings,
    };
    Ok(RunOutcome { report, eigenpairs })
}
