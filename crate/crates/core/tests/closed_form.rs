//! q = 0, where the characteristic function has a closed form.

use std::sync::Arc;

use slrsm_core::oracle::find_zeros_closed_form;
use slrsm_core::oracle::oracle_ivp_config;
use slrsm_core::roots::{error_estimate, fit_c4, fit_grid, scan_and_refine};
use slrsm_core::sampling::build_sample_table;
use slrsm_core::{IvpConfig, Problem, SampleTable, SamplingConfig};

fn table(a: f64, d: f64) -> (Problem, Arc<SampleTable>) {
    let p = Problem::parse("0", a, d).unwrap();
    let cfg = SamplingConfig::new(40, 6, d, None).unwrap();
    let t = Arc::new(build_sample_table(&p, &cfg, &IvpConfig::default()).unwrap());
    (p, t)
}

fn rsm_zeros(a: f64, d: f64, mu_max: f64) -> Vec<f64> {
    let (_, t) = table(a, d);
    scan_and_refine(&t, a, mu_max, 0.01, 1e-12)
        .unwrap()
        .roots
        .iter()
        .map(|r| r.mu)
        .collect()
}

#[test]
fn continuous_problem_has_half_integer_zeros() {
    for d in [0.5, 1.0, 2.0] {
        let z = rsm_zeros(1.0, d, 5.2);
        assert_eq!(z.len(), 5, "d = {d}: {z:?}");
        for (k, mu) in z.iter().enumerate() {
            assert!((mu - (k as f64 + 0.5)).abs() <= 1e-10, "d = {d}: {mu}");
        }
    }
}

#[test]
fn jump_problems_match_closed_form() {
    for a in [0.5, 2.0, 3.0] {
        for d in [0.5, 1.0, 2.0] {
            let z = rsm_zeros(a, d, 10.0);
            let reference = find_zeros_closed_form(a, d, 10.0, 0.01, 1e-13)
                .unwrap()
                .zeros;
            assert_eq!(z.len(), reference.len(), "a = {a}, d = {d}");
            for (x, y) in z.iter().zip(&reference) {
                assert!((x - y).abs() <= 1e-9, "a = {a}, d = {d}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn coarse_scan_of_continuous_problem() {
    let (_, t) = table(1.0, 1.3);
    let roots = scan_and_refine(&t, 1.0, 5.0, 0.05, 1e-12).unwrap().roots;
    assert_eq!(roots.len(), 5);
    for (k, r) in roots.iter().enumerate() {
        assert!((r.mu - (k as f64 + 0.5)).abs() <= 1e-10);
    }
}

#[test]
fn jump_at_one_against_scalar_bisection() {
    let f = |mu: f64| {
        2.0 * mu.cos() * (mu * (std::f64::consts::PI - 1.0)).cos()
            - 0.5 * mu.sin() * (mu * (std::f64::consts::PI - 1.0)).sin()
    };
    let z = rsm_zeros(2.0, 1.0, 6.0);
    assert!(!z.is_empty());
    for mu in z {
        let (mut lo, mut hi) = (mu - 1e-3, mu + 1e-3);
        assert!(f(lo).signum() != f(hi).signum());
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == f(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((mu - 0.5 * (lo + hi)).abs() <= 1e-10, "{mu} vs {lo}");
    }
}

#[test]
fn estimate_covers_error_at_first_half_integer() {
    let (p, t) = table(1.0, 1.0);
    let c4 = fit_c4(&t, &p, &oracle_ivp_config(), &fit_grid(&t, 50)).unwrap();
    let root = scan_and_refine(&t, 1.0, 1.0, 0.01, 1e-12).unwrap().roots[0];
    let est = error_estimate(&t, 1.0, &root, c4).unwrap();
    assert!(
        est >= (root.mu - 0.5).abs(),
        "{est:e} < {:e}",
        (root.mu - 0.5).abs()
    );
}
