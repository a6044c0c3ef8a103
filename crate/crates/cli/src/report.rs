//! The run report written as report.json.

use serde::{Deserialize, Serialize};
use slrsm_core::eigen::TransmissionCheck;
use slrsm_core::sampling::SamplingConfig;
use slrsm_core::{IvpConfig, OracleResult, RootResult};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSection {
    pub q: String,
    pub a: f64,
    pub d: f64,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSection {
    pub mu_max: f64,
    pub scan_step: f64,
    pub tol: f64,
}

/// One line of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub index: usize,
    pub oracle_mu: f64,
    pub rsm_mu: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionSummary {
    pub index: usize,
    pub mu: f64,
    pub alpha: f64,
    pub l2_norm: f64,
    pub transmission: TransmissionCheck,
    pub file: String,
}

/// Wall-clock seconds per phase. The only part of a report that may differ
/// between identical runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub cache_hit: bool,
    pub sampling: f64,
    pub roots: f64,
    pub error_estimates: f64,
    pub oracle: f64,
    pub eigenfunctions: f64,
    pub gram: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub method: String,
    pub problem: ProblemSection,
    pub sampling: SamplingConfig,
    pub ivp: IvpConfig,
    pub oracle_ivp: IvpConfig,
    pub scan: ScanSection,
    pub problem_hash: String,
    /// Constant of the `|Delta - B_N|` bound, fitted against direct
    /// integration; `None` when no sample table is involved.
    pub c4: Option<f64>,
    pub roots: Vec<RootResult>,
    pub skipped_scan_points: Vec<f64>,
    pub touching_points: Vec<f64>,
    pub oracle: Option<OracleResult>,
    pub table: Vec<ComparisonRow>,
    pub eigenfunctions: Vec<EigenfunctionSummary>,
    pub gram: Vec<Vec<f64>>,
    pub gram_max_off_diagonal: Option<f64>,
    pub warnings: Vec<String>,
    pub timings: Timings,
}

impl RunReport {
    /// The report with timings zeroed, for run-to-run comparison.
    pub fn without_timings(&self) -> Self {
        Self {
            timings: Timings::default(),
            ..self.clone()
        }
    }
}

/// Pairs each root with the nearest oracle zero.
pub fn comparison_rows(roots: &[RootResult], oracle: &[f64]) -> Vec<ComparisonRow> {
    roots
        .iter()
        .enumerate()
        .filter_map(|(k, root)| {
            let nearest = oracle
                .iter()
                .copied()
                .min_by(|x, y| (x - root.mu).abs().total_cmp(&(y - root.mu).abs()))?;
            let abs_err = (nearest - root.mu).abs();
            Some(ComparisonRow {
                index: k + 1,
                oracle_mu: nearest,
                rsm_mu: root.mu,
                abs_err,
                rel_err: abs_err / nearest.abs(),
            })
        })
        .collect()
}
