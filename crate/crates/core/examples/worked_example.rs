//! q(x) = x, a = 2, d = 1: sampled zeros against direct shooting.
//!
//! cargo run -p slrsm-core --example worked_example

use std::sync::Arc;

use slrsm_core::oracle::{find_zeros_direct, oracle_ivp_config};
use slrsm_core::roots::{error_estimate, fit_c4, fit_grid, scan_and_refine};
use slrsm_core::sampling::build_sample_table;
use slrsm_core::{IvpConfig, Problem, SamplingConfig};

fn main() -> slrsm_core::Result<()> {
    let problem = Problem::parse("x", 2.0, 1.0)?;
    let cfg = SamplingConfig::new(40, 6, problem.d, None)?;
    let table = Arc::new(build_sample_table(&problem, &cfg, &IvpConfig::default())?);

    let roots = scan_and_refine(&table, problem.a, 4.0, 0.01, 1e-12)?.roots;
    let oracle = find_zeros_direct(&problem, 4.0, 0.01, 1e-12, &oracle_ivp_config())?;
    let c4 = fit_c4(
        &table,
        &problem,
        &oracle_ivp_config(),
        &fit_grid(&table, 50),
    )?;

    println!(
        "{:<6} {:<16} {:<16} {:<12} {:<12}",
        "k", "direct", "sampled", "|diff|", "estimate"
    );
    for (k, (root, exact)) in roots.iter().zip(&oracle.zeros).enumerate() {
        let est = error_estimate(&table, problem.a, root, c4)?;
        println!(
            "{:<6} {:<16.12} {:<16.12} {:<12.3e} {:<12.3e}",
            k + 1,
            exact,
            root.mu,
            (root.mu - exact).abs(),
            est
        );
    }
    Ok(())
}
