//! Zero location by uniform scan and bisection, plus a-posteriori bounds.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ivp::IvpConfig;
use crate::method::{CharacteristicFunction, SampledCharacteristic};
use crate::oracle::delta_direct;
use crate::problem::Problem;
use crate::sampling::{characteristic, jagerman_factor, SampleTable};

pub const DEFAULT_SCAN_STEP: f64 = 0.01;
pub const DEFAULT_TOL: f64 = 1e-12;
/// Central-difference step for `B_N'`.
pub const DERIVATIVE_STEP: f64 = 1e-6;
const MIN_DERIVATIVE: f64 = 1e-10;
/// Fit points with `|sin(sigma mu)|` below this are dropped: the bound
/// degenerates there.
const FIT_SIN_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub mu: f64,
    pub eigenvalue: f64,
    /// Scan bracket the root was refined from; the function changes sign
    /// across it.
    pub bracket: (f64, f64),
    pub residual: f64,
    pub error_estimate: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub roots: Vec<RootResult>,
    /// Grid points skipped because the regularizer vanished there.
    pub skipped: Vec<f64>,
    /// Grid points where the function is exactly zero without changing sign.
    pub touching: Vec<f64>,
}

fn scan_grid(mu_max: f64, step: f64) -> Vec<f64> {
    let n = (mu_max / step * (1.0 + 1e-12)).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    let last = *grid.last().unwrap_or(&0.0);
    if mu_max - last > 1e-9 * step {
        grid.push(mu_max);
    }
    grid
}

/// Bisects `[lo, hi]` down to width `tol`. `f_lo` must differ in sign from
/// `f(hi)`.
fn bisect(
    f: &dyn CharacteristicFunction,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    tol: f64,
) -> Result<f64> {
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f.eval(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// Scans `[0, mu_max]` with spacing `scan_step` and refines every sign change.
pub fn scan(
    f: &dyn CharacteristicFunction,
    mu_max: f64,
    scan_step: f64,
    tol: f64,
) -> Result<ScanOutcome> {
    if !(scan_step > 0.0 && scan_step.is_finite()) {
        return Err(Error::InvalidScan(format!(
            "scan_step must be positive, got {scan_step}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidScan(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if !(mu_max > 0.0 && mu_max.is_finite()) {
        return Err(Error::InvalidScan(format!(
            "mu_max must be positive, got {mu_max}"
        )));
    }
    if let Some(limit) = f.search_limit() {
        if mu_max > limit {
            return Err(Error::BandExceeded { mu_max, limit });
        }
    }

    let grid = scan_grid(mu_max, scan_step);
    let values = grid
        .par_iter()
        .map(|&mu| match f.eval(mu) {
            Ok(v) => Ok(Some(v)),
            Err(Error::SingularRegularizer { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut outcome = ScanOutcome::default();
    let mut brackets = Vec::new();
    for (i, (&mu, value)) in grid.iter().zip(&values).enumerate() {
        let Some(value) = *value else {
            outcome.skipped.push(mu);
            continue;
        };
        // mu = 0 sits on the symmetry axis of an even function: never a crossing
        if value == 0.0 && i > 0 {
            let lo = mu - 0.5 * scan_step;
            let hi = (mu + 0.5 * scan_step).min(mu_max.max(mu));
            let (f_lo, f_hi) = (f.eval(lo)?, f.eval(hi)?);
            if f_lo * f_hi < 0.0 {
                brackets.push((lo, hi, f_lo));
            } else {
                outcome.touching.push(mu);
            }
            continue;
        }
        if i + 1 < grid.len() {
            if let Some(next) = values[i + 1] {
                if value * next < 0.0 {
                    brackets.push((mu, grid[i + 1], value));
                }
            }
        }
    }

    let roots = brackets
        .par_iter()
        .map(|&(lo, hi, f_lo)| {
            let mu = bisect(f, lo, hi, f_lo, tol)?;
            Ok(RootResult {
                mu,
                eigenvalue: mu * mu,
                bracket: (lo, hi),
                residual: f.eval(mu)?.abs(),
                error_estimate: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    outcome.roots = roots;
    outcome.roots.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    Ok(outcome)
}

/// Zeros of `B_N` on `[0, mu_max]`; `mu_max` may not exceed `0.9 N pi / sigma`.
pub fn scan_and_refine(
    table: &Arc<SampleTable>,
    a: f64,
    mu_max: f64,
    scan_step: f64,
    tol: f64,
) -> Result<ScanOutcome> {
    let f = SampledCharacteristic::new(Arc::clone(table), a);
    scan(&f, mu_max, scan_step, tol)
}

/// Right-hand side of the `|Delta - B_N|` bound for a given constant `c4`.
pub fn characteristic_bound(table: &SampleTable, mu: f64, c4: f64) -> Result<f64> {
    let cfg = &table.config;
    Ok(c4 * jagerman_factor(cfg, mu)? / cfg.regularizer(mu).abs())
}

/// `50` points spread over `(0, 0.9 N pi / sigma)` for constant fits.
pub fn fit_grid(table: &SampleTable, points: usize) -> Vec<f64> {
    let top = table.config.search_limit();
    (1..=points)
        .map(|i| (i as f64 - 0.5) / points as f64 * top)
        .collect()
}

/// Smallest `c4` making the `|Delta - B_N|` bound hold on `grid`, with
/// `Delta` from direct integration.
pub fn fit_c4(
    table: &SampleTable,
    problem: &Problem,
    ivp: &IvpConfig,
    grid: &[f64],
) -> Result<f64> {
    let cfg = &table.config;
    let ratios = grid
        .par_iter()
        .filter(|&&mu| (cfg.sigma * mu).sin().abs() >= FIT_SIN_FLOOR)
        .map(|&mu| {
            let gap =
                (delta_direct(problem, mu, ivp)? - characteristic(table, problem.a, mu)?).abs();
            Ok(gap / characteristic_bound(table, mu, 1.0)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Smallest `C` with `|Delta - B_N| <= C |sinc(theta mu)|^{-m} (N+1)^{-(m-1)}`
/// on `grid`.
pub fn fit_decay_constant(
    table: &SampleTable,
    problem: &Problem,
    ivp: &IvpConfig,
    grid: &[f64],
) -> Result<f64> {
    let cfg = &table.config;
    let rate = ((cfg.n + 1) as f64).powi(cfg.m as i32 - 1);
    let ratios = grid
        .par_iter()
        .map(|&mu| {
            let gap =
                (delta_direct(problem, mu, ivp)? - characteristic(table, problem.a, mu)?).abs();
            Ok(gap * cfg.regularizer(mu).abs() * rate)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// `B_N'(mu)` by central difference.
pub fn characteristic_slope(table: &SampleTable, a: f64, mu: f64) -> Result<f64> {
    let h = DERIVATIVE_STEP;
    Ok((characteristic(table, a, mu + h)? - characteristic(table, a, mu - h)?) / (2.0 * h))
}

/// Bound on `|mu_N - mu_exact|`: the `|Delta - B_N|` bound at `mu_N` divided
/// by `|B_N'(mu_N)|`. The slope is taken at `mu_N` itself rather than as an
/// infimum over a neighbourhood, so the result is a heuristic estimate.
pub fn error_estimate(table: &SampleTable, a: f64, root: &RootResult, c4: f64) -> Result<f64> {
    let slope = characteristic_slope(table, a, root.mu)?.abs();
    if slope < MIN_DERIVATIVE {
        return Err(Error::DerivativeTooSmall {
            mu: root.mu,
            derivative: slope,
        });
    }
    Ok(characteristic_bound(table, root.mu, c4)? / slope)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::method::ClosedFormCharacteristic;
    use crate::sampling::{build_sample_table, SamplingConfig};

    struct Shifted(f64);
    impl CharacteristicFunction for Shifted {
        fn name(&self) -> &str {
            "shifted"
        }
        fn eval(&self, mu: f64) -> Result<f64> {
            Ok((mu - self.0) * (mu - 2.0 * self.0))
        }
    }

    #[test]
    fn grid_includes_endpoint() {
        let g = scan_grid(1.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(scan_grid(5.0, 0.05).len(), 101);
    }

    #[test]
    fn cosine_zeros() {
        let f = ClosedFormCharacteristic::new(1.0, 1.0);
        let out = scan(&f, 5.0, 0.05, 1e-12).unwrap();
        let mus: Vec<f64> = out.roots.iter().map(|r| r.mu).collect();
        assert_eq!(mus.len(), 5);
        for (k, mu) in mus.iter().enumerate() {
            assert!((mu - (k as f64 + 0.5)).abs() < 1e-10, "{mu}");
        }
        for r in &out.roots {
            assert!(r.bracket.0 < r.mu && r.mu < r.bracket.1);
            let (lo, hi) = (f.eval(r.bracket.0).unwrap(), f.eval(r.bracket.1).unwrap());
            assert!(lo * hi < 0.0);
            assert_eq!(r.eigenvalue, r.mu * r.mu);
        }
    }

    #[test]
    fn zero_on_grid_point() {
        // roots at 0.5 and 1.0 land exactly on grid points
        let out = scan(&Shifted(0.5), 2.0, 0.25, 1e-12).unwrap();
        assert_eq!(out.roots.len(), 2);
        assert!((out.roots[0].mu - 0.5).abs() <= 1e-12);
        assert!((out.roots[1].mu - 1.0).abs() <= 1e-12);
        assert!(out.touching.is_empty());
    }

    #[test]
    fn double_root_is_touching() {
        struct Square;
        impl CharacteristicFunction for Square {
            fn name(&self) -> &str {
                "square"
            }
            fn eval(&self, mu: f64) -> Result<f64> {
                Ok((mu - 1.0).powi(2))
            }
        }
        let out = scan(&Square, 2.0, 0.25, 1e-12).unwrap();
        assert!(out.roots.is_empty());
        assert_eq!(out.touching, vec![1.0]);
    }

    #[test]
    fn origin_is_not_a_root() {
        let out = scan(&Shifted(0.0), 1.0, 0.1, 1e-12).unwrap();
        assert!(out.roots.is_empty());
    }

    #[test]
    fn argument_checks() {
        let f = ClosedFormCharacteristic::new(1.0, 1.0);
        assert!(scan(&f, 5.0, 0.0, 1e-12).is_err());
        assert!(scan(&f, 5.0, 0.1, 0.0).is_err());
        assert!(scan(&f, -1.0, 0.1, 1e-12).is_err());
    }

    #[test]
    fn band_exceeded() {
        let p = Problem::parse("0", 2.0, 1.0).unwrap();
        let cfg = SamplingConfig::new(20, 6, 1.0, None).unwrap();
        let t = Arc::new(build_sample_table(&p, &cfg, &IvpConfig::default()).unwrap());
        let limit = cfg.search_limit();
        assert!(matches!(
            scan_and_refine(&t, 2.0, limit * 1.01, 0.01, 1e-12),
            Err(Error::BandExceeded { .. })
        ));
    }

    #[test]
    fn skips_singular_points() {
        // theta large enough that a regularizer zero sits inside the scan range
        let cfg = SamplingConfig::new(40, 6, 1.0, Some(PI / 2.0)).unwrap();
        let zeros = vec![0.0; 41];
        let t = Arc::new(
            SampleTable::from_samples(cfg, [zeros.clone(), zeros.clone(), zeros.clone(), zeros])
                .unwrap(),
        );
        let out = scan_and_refine(&t, 1.0, 2.4, 0.4, 1e-12).unwrap();
        assert_eq!(out.skipped, vec![2.0]);
        let mus: Vec<f64> = out.roots.iter().map(|r| r.mu).collect();
        assert_eq!(mus.len(), 2);
        assert!((mus[0] - 0.5).abs() < 1e-10 && (mus[1] - 1.5).abs() < 1e-10);
    }

    #[test]
    fn error_estimate_for_free_problem() {
        let p = Problem::parse("0", 1.0, 1.0).unwrap();
        let cfg = SamplingConfig::new(40, 6, 1.0, None).unwrap();
        let ivp = IvpConfig::default();
        let t = Arc::new(build_sample_table(&p, &cfg, &ivp).unwrap());
        let out = scan_and_refine(&t, 1.0, 1.0, 0.01, 1e-12).unwrap();
        let root = out.roots[0];
        let grid = fit_grid(&t, 50);
        let c4 = fit_c4(&t, &p, &ivp.tightened(10.0), &grid).unwrap();
        let est = error_estimate(&t, 1.0, &root, c4).unwrap();
        assert!(est.is_finite());
        assert!(
            est >= (root.mu - 0.5).abs(),
            "{est} vs {}",
            (root.mu - 0.5).abs()
        );
    }
}
