//! Cache keys for sample tables.

use sha2::{Digest, Sha256};
use slrsm_core::sampling::{SamplingConfig, TABLE_FORMAT_VERSION};
use slrsm_core::IvpConfig;

/// SHA-256 over everything the samples depend on. Floats enter by their
/// bit patterns, so `1.0` and `1.0000000000000002` hash differently.
pub fn problem_hash(
    q_source: &str,
    a: f64,
    d: f64,
    sampling: &SamplingConfig,
    ivp: &IvpConfig,
) -> String {
    let canonical = format!(
        "slrsm-table v{TABLE_FORMAT_VERSION}\nq={}\na={:016x}\nd={:016x}\nN={}\nm={}\ntheta={:016x}\nabs_tol={:016x}\nrel_tol={:016x}\nh_init={:016x}\nh_min={:016x}\nmax_steps={}\n",
        q_source.trim(),
        a.to_bits(),
        d.to_bits(),
        sampling.n,
        sampling.m,
        sampling.theta.to_bits(),
        ivp.abs_tol.to_bits(),
        ivp.rel_tol.to_bits(),
        ivp.h_init.to_bits(),
        ivp.h_min.to_bits(),
        ivp.max_steps,
    );
    hex::encode(Sha256::digest(canonical.as_bytes()))
}
