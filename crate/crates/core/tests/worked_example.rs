//! q(x) = x, a = 2, d = 1 with N = 40, m = 6 and the default theta.

use std::f64::consts::PI;
use std::sync::Arc;

use slrsm_core::base::boundary_quad;
use slrsm_core::oracle::{delta_direct, find_zeros_direct, oracle_ivp_config};
use slrsm_core::roots::{error_estimate, fit_c4, fit_grid, scan_and_refine};
use slrsm_core::sampling::{
    build_sample_table, characteristic, reconstruct_quad, regularize, truncation_bound, Component,
};
use slrsm_core::{IvpConfig, Problem, SampleTable, SamplingConfig};

const EXACT: [f64; 4] = [1.22788546912, 1.83749384727, 2.68396812434, 3.85661744715];
const RSM: [f64; 4] = [
    1.227885469249,
    1.837493847255,
    2.683968124476,
    3.856617447367,
];

fn problem() -> Problem {
    Problem::parse("x", 2.0, 1.0).unwrap()
}

fn table(n: usize) -> Arc<SampleTable> {
    let cfg = SamplingConfig::new(n, 6, 1.0, None).unwrap();
    Arc::new(build_sample_table(&problem(), &cfg, &IvpConfig::default()).unwrap())
}

#[test]
fn oracle_reproduces_exact_column() {
    let oracle = find_zeros_direct(&problem(), 4.0, 0.01, 1e-12, &oracle_ivp_config()).unwrap();
    assert_eq!(oracle.zeros.len(), 4);
    for (z, e) in oracle.zeros.iter().zip(EXACT) {
        assert!((z - e).abs() <= 1e-9, "{z} vs {e}");
    }
    assert!(
        delta_direct(&problem(), EXACT[0], &oracle_ivp_config())
            .unwrap()
            .abs()
            <= 1e-9
    );
}

#[test]
fn rsm_zeros_and_characteristic() {
    let t = table(40);
    assert!(characteristic(&t, 2.0, RSM[0]).unwrap().abs() <= 1e-8);
    let out = scan_and_refine(&t, 2.0, 4.0, 0.01, 1e-12).unwrap();
    assert_eq!(out.roots.len(), 4);
    for (r, p) in out.roots.iter().zip(RSM) {
        assert!((r.mu - p).abs() <= 1e-8, "{} vs {p}", r.mu);
        assert_eq!(r.eigenvalue, r.mu * r.mu);
    }
}

#[test]
fn first_root_estimate_covers_observed_error() {
    let t = table(40);
    let p = problem();
    let ivp = oracle_ivp_config();
    let c4 = fit_c4(&t, &p, &ivp, &fit_grid(&t, 50)).unwrap();
    let out = scan_and_refine(&t, 2.0, 4.0, 0.01, 1e-12).unwrap();
    let oracle = find_zeros_direct(&p, 4.0, 0.01, 1e-12, &ivp).unwrap();
    let est = error_estimate(&t, 2.0, &out.roots[0], c4).unwrap();
    let observed = (out.roots[0].mu - oracle.zeros[0]).abs();
    assert!(est >= observed, "estimate {est:e} < observed {observed:e}");
}

#[test]
fn spot_sample_against_tighter_integration() {
    let t = table(40);
    let mu1 = t.nodes[1];
    let tight = IvpConfig::with_tolerance(1e-14);
    let quad = boundary_quad(&problem().potential, mu1, 1.0, &tight).unwrap();
    let h = regularize(&quad, &t.config);
    for (k, c) in Component::ALL.into_iter().enumerate() {
        assert!((t.samples(c)[1] - h[k]).abs() <= 1e-10, "{c:?}");
    }
}

#[test]
fn reconstruction_within_truncation_bound() {
    let t = table(40);
    let mu = 1.0;
    let direct = boundary_quad(&problem().potential, mu, 1.0, &oracle_ivp_config()).unwrap();
    let rebuilt = reconstruct_quad(&t, mu).unwrap();
    let r = t.config.regularizer(mu).abs();
    let pairs = [
        (Component::H11, rebuilt.y_left, direct.y_left),
        (Component::H12, rebuilt.dy_left, direct.dy_left),
        (Component::H21, rebuilt.y_right, direct.y_right),
        (Component::H22, rebuilt.dy_right, direct.dy_right),
    ];
    for (c, got, want) in pairs {
        let bound = truncation_bound(&t, c, mu).unwrap() / r;
        // integrator noise in the samples rides on top of the truncation error
        assert!(
            (got - want).abs() <= bound + 1e-10,
            "{c:?}: {:e} > {bound:e}",
            (got - want).abs()
        );
    }
}

/// Extra decay of each component beyond the regularizer, from the growth
/// estimates of the base solutions: `y_L - cos` and `y_R' - cos` lose one
/// power of `1 + pi mu`, `y_R + sin/mu` two, `y_L' + mu sin` none.
fn extra_decay(c: Component) -> i32 {
    match c {
        Component::H11 | Component::H22 => 1,
        Component::H12 => 0,
        Component::H21 => 2,
    }
}

#[test]
fn samples_decay_like_regularizer() {
    let t = table(40);
    let cfg = t.config;
    for c in Component::ALL {
        let mut scaled: Vec<f64> = t
            .samples(c)
            .iter()
            .zip(&t.nodes)
            .map(|(h, mu)| {
                (1.0 + cfg.theta * mu).powi(cfg.m as i32)
                    * (1.0 + PI * mu).powi(extra_decay(c))
                    * h.abs()
            })
            .collect();
        let max = scaled.iter().copied().fold(0.0, f64::max);
        scaled.sort_by(f64::total_cmp);
        let median = scaled[scaled.len() / 2];
        assert!(
            max <= 10.0 * median,
            "{c:?}: max {max:e}, median {median:e}"
        );
    }
}

#[test]
fn truncation_bound_shrinks_with_n() {
    let (t20, t40) = (table(20), table(40));
    // halfway between the two middle nodes of the N = 20 table; the nodes
    // themselves carry no truncation error
    let mu = 10.5 * PI / t20.config.sigma;
    for c in Component::ALL {
        let b20 = truncation_bound(&t20, c, mu).unwrap();
        let b40 = truncation_bound(&t40, c, mu).unwrap();
        assert!(b20 > 0.0 && b40 < b20, "{c:?}: {b20:e} -> {b40:e}");
    }
}
