//! Embedded Runge-Kutta-Fehlberg 4(5) integration of
//!
//! ```text
//! u' = v
//! v' = (q(x) - mu^2) u
//! ```
//!
//! Steps are controlled on the difference between the 4th and 5th order
//! solutions; the 5th order solution is propagated. Output abscissae are hit
//! exactly by shortening the step that would cross them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::PotentialExpr;

const C: [f64; 6] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];

const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [
        -8.0 / 27.0,
        2.0,
        -3544.0 / 2565.0,
        1859.0 / 4104.0,
        -11.0 / 40.0,
    ],
];

const B4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -0.2,
    0.0,
];

const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.1;
const MAX_FACTOR: f64 = 5.0;

/// Position and solution (u = y, v = y') along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvpState {
    pub x: f64,
    pub u: f64,
    pub v: f64,
}

/// Step control settings.
///
/// `h_init` and `h_min` are given as fractions of the integration length
/// `|to - from|`, so one configuration serves every subinterval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvpConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for IvpConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            h_init: 1e-2,
            h_min: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

impl IvpConfig {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    /// Same settings with both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidIvpConfig(msg.to_string()));
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return bad("abs_tol must be positive");
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return bad("rel_tol must be positive");
        }
        if !(self.h_init > 0.0 && self.h_init <= 1.0) {
            return bad("h_init must lie in (0, 1] (fraction of the interval)");
        }
        if !(self.h_min > 0.0 && self.h_min < self.h_init) {
            return bad("h_min must satisfy 0 < h_min < h_init");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub last: IvpState,
    /// States at the requested output abscissae, in the order they were given.
    pub states: Vec<IvpState>,
}

struct System<'a> {
    q: &'a PotentialExpr,
    mu_sq: f64,
}

impl System<'_> {
    fn rhs(&self, x: f64, u: f64, v: f64) -> Result<(f64, f64)> {
        let qx = self.q.eval(x)?;
        Ok((v, (qx - self.mu_sq) * u))
    }

    /// One Fehlberg step: returns the 5th order state and the 4(5) difference.
    fn step(&self, x: f64, u: f64, v: f64, h: f64) -> Result<((f64, f64), (f64, f64))> {
        let mut ku = [0.0; 6];
        let mut kv = [0.0; 6];
        for s in 0..6 {
            let mut us = u;
            let mut vs = v;
            for j in 0..s {
                us += h * A[s][j] * ku[j];
                vs += h * A[s][j] * kv[j];
            }
            let (du, dv) = self.rhs(x + C[s] * h, us, vs)?;
            ku[s] = du;
            kv[s] = dv;
        }
        let mut u5 = u;
        let mut v5 = v;
        let mut eu = 0.0;
        let mut ev = 0.0;
        for s in 0..6 {
            u5 += h * B5[s] * ku[s];
            v5 += h * B5[s] * kv[s];
            eu += h * (B5[s] - B4[s]) * ku[s];
            ev += h * (B5[s] - B4[s]) * kv[s];
        }
        Ok(((u5, v5), (eu, ev)))
    }
}

/// Integrates from `from` to `to` (either direction) starting at `init = (u, v)`.
///
/// Every abscissa in `output_grid` must lie in the closed interval between
/// `from` and `to`; the grid may be given in ascending or descending order.
pub fn integrate(
    q: &PotentialExpr,
    mu_sq: f64,
    from: f64,
    to: f64,
    init: (f64, f64),
    cfg: &IvpConfig,
    output_grid: &[f64],
) -> Result<Trajectory> {
    cfg.validate()?;
    if from == to || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidIvpConfig(format!(
            "integration interval [{from}, {to}] is empty or non-finite"
        )));
    }
    let dir = (to - from).signum();
    let length = (to - from).abs();
    let (lo, hi) = (from.min(to), from.max(to));
    if let Some(bad) = output_grid.iter().find(|&&g| !(lo..=hi).contains(&g)) {
        return Err(Error::InvalidIvpConfig(format!(
            "output abscissa {bad} lies outside [{lo}, {hi}]"
        )));
    }

    // Visit output points in the direction of integration.
    let mut order: Vec<usize> = (0..output_grid.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (output_grid[i] * dir, output_grid[j] * dir);
        a.total_cmp(&b)
    });

    let sys = System { q, mu_sq };
    let h_min = cfg.h_min * length;
    let mut h = cfg.h_init * length;
    let mut x = from;
    let (mut u, mut v) = init;
    let mut steps = 0usize;
    let mut states = vec![IvpState { x: from, u, v }; output_grid.len()];

    let targets = order
        .iter()
        .map(|&i| (Some(i), output_grid[i]))
        .chain(std::iter::once((None, to)));
    for (slot, target) in targets {
        while (target - x) * dir > 0.0 {
            if steps >= cfg.max_steps {
                return Err(Error::MaxStepsExceeded {
                    max_steps: cfg.max_steps,
                    target: to,
                });
            }
            steps += 1;
            let remaining = (target - x).abs();
            let lands = h >= remaining * (1.0 - 1e-12);
            let step = if lands { remaining } else { h };
            let ((u5, v5), (eu, ev)) = sys.step(x, u, v, dir * step)?;
            if !(u5.is_finite() && v5.is_finite()) {
                return Err(Error::NonFiniteState { x });
            }
            let err = (eu.abs() / (cfg.abs_tol + cfg.rel_tol * u.abs().max(u5.abs())))
                .max(ev.abs() / (cfg.abs_tol + cfg.rel_tol * v.abs().max(v5.abs())));
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if err <= 1.0 {
                x = if lands { target } else { x + dir * step };
                u = u5;
                v = v5;
                let proposed = step * factor;
                // a step shortened to land on a target says nothing about the usable size
                h = if lands { proposed.max(h) } else { proposed };
            } else {
                h = step * factor;
                if h < h_min {
                    return Err(Error::StepSizeUnderflow { x, step: h, h_min });
                }
            }
        }
        if let Some(i) = slot {
            states[i] = IvpState { x: target, u, v };
        }
    }

    Ok(Trajectory {
        last: IvpState { x: to, u, v },
        states,
    })
}

/// Classical fixed-step Fehlberg integration with `n_steps` equal steps.
/// Used for convergence-order checks.
pub fn integrate_fixed(
    q: &PotentialExpr,
    mu_sq: f64,
    from: f64,
    to: f64,
    init: (f64, f64),
    n_steps: usize,
) -> Result<IvpState> {
    let sys = System { q, mu_sq };
    let h = (to - from) / n_steps as f64;
    let (mut u, mut v) = init;
    for i in 0..n_steps {
        let x = from + i as f64 * h;
        let ((u5, v5), _) = sys.step(x, u, v, h)?;
        u = u5;
        v = v5;
    }
    Ok(IvpState { x: to, u, v })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn q(src: &str) -> PotentialExpr {
        PotentialExpr::parse(src).unwrap()
    }

    #[test]
    fn cosine_over_full_interval() {
        let t = integrate(
            &q("0"),
            1.0,
            0.0,
            PI,
            (1.0, 0.0),
            &IvpConfig::default(),
            &[],
        )
        .unwrap();
        assert!((t.last.u + 1.0).abs() < 1e-10, "{}", t.last.u);
        assert!(t.last.v.abs() < 1e-10);
    }

    #[test]
    fn reverse_direction() {
        let t = integrate(
            &q("0"),
            0.25,
            PI,
            1.0,
            (0.0, 1.0),
            &IvpConfig::default(),
            &[],
        )
        .unwrap();
        let expected = -(0.5 * (PI - 1.0)).sin() / 0.5;
        assert!((t.last.u - expected).abs() < 1e-10);
        assert_eq!(t.last.x, 1.0);
    }

    #[test]
    fn linear_potential_against_tighter_run() {
        let mu = 1.227_885_469_12_f64;
        let cfg = IvpConfig::default();
        let coarse = integrate(&q("x"), mu * mu, 0.0, 1.0, (1.0, 0.0), &cfg, &[]).unwrap();
        let fine = integrate(
            &q("x"),
            mu * mu,
            0.0,
            1.0,
            (1.0, 0.0),
            &cfg.tightened(100.0),
            &[],
        )
        .unwrap();
        assert!((coarse.last.u - fine.last.u).abs() < 1e-9);
        assert!((coarse.last.v - fine.last.v).abs() < 1e-9);
    }

    #[test]
    fn grid_points_are_hit_exactly() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let t = integrate(
            &q("0"),
            0.25,
            0.0,
            1.0,
            (1.0, 0.0),
            &IvpConfig::default(),
            &grid,
        )
        .unwrap();
        for (g, s) in grid.iter().zip(&t.states) {
            assert_eq!(s.x, *g);
            assert!((s.u - (0.5 * g).cos()).abs() < 1e-10);
        }
        // descending grid, reverse integration
        let rev: Vec<f64> = grid.iter().rev().copied().collect();
        let t = integrate(
            &q("0"),
            0.25,
            1.0,
            0.0,
            ((0.5f64).cos(), -0.5 * (0.5f64).sin()),
            &IvpConfig::default(),
            &rev,
        )
        .unwrap();
        for (g, s) in rev.iter().zip(&t.states) {
            assert!((s.u - (0.5 * g).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn direction_symmetry() {
        let cfg = IvpConfig::default();
        let p = q("x");
        let fwd = integrate(&p, 4.0, 0.0, 1.0, (1.0, 0.0), &cfg, &[])
            .unwrap()
            .last;
        let back = integrate(&p, 4.0, 1.0, 0.0, (fwd.u, fwd.v), &cfg, &[])
            .unwrap()
            .last;
        assert!(
            (back.u - 1.0).abs() < 10.0 * cfg.abs_tol,
            "{}",
            back.u - 1.0
        );
        assert!(back.v.abs() < 10.0 * cfg.abs_tol, "{}", back.v);
    }

    #[test]
    fn wronskian_is_conserved() {
        let cfg = IvpConfig::default();
        let p = q("x + sin(3*x)");
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.15).collect();
        let a = integrate(&p, 2.3, 0.0, 3.0, (1.0, 0.0), &cfg, &grid).unwrap();
        let b = integrate(&p, 2.3, 0.0, 3.0, (0.0, 1.0), &cfg, &grid).unwrap();
        for (s1, s2) in a.states.iter().zip(&b.states) {
            let w = s1.u * s2.v - s1.v * s2.u;
            assert!((w - 1.0).abs() < 1e-9, "W = {w} at {}", s1.x);
        }
    }

    #[test]
    fn error_paths() {
        let p = q("0");
        let cfg = IvpConfig::default();
        assert!(integrate(&p, 1.0, 1.0, 1.0, (1.0, 0.0), &cfg, &[]).is_err());
        assert!(integrate(&p, 1.0, 0.0, 1.0, (1.0, 0.0), &cfg, &[2.0]).is_err());
        let few = IvpConfig {
            max_steps: 3,
            ..cfg
        };
        assert!(matches!(
            integrate(&p, 400.0, 0.0, PI, (1.0, 0.0), &few, &[]),
            Err(Error::MaxStepsExceeded { .. })
        ));
        let strict = IvpConfig {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            h_min: 1e-3,
            ..cfg
        };
        assert!(matches!(
            integrate(&p, 1.0, 0.0, PI, (1.0, 0.0), &strict, &[]),
            Err(Error::StepSizeUnderflow { .. })
        ));
        assert!(matches!(
            integrate(
                &q("exp(exp(exp(x*3)))"),
                0.0,
                0.0,
                PI,
                (1.0, 0.0),
                &cfg,
                &[]
            ),
            Err(Error::NonFiniteState { .. }) | Err(Error::StepSizeUnderflow { .. })
        ));
        assert!(matches!(
            integrate(&q("log(x - 1)"), 0.0, 0.0, 2.0, (1.0, 0.0), &cfg, &[]),
            Err(Error::Expr(_))
        ));
    }

    #[test]
    fn invalid_configs() {
        let base = IvpConfig::default();
        for cfg in [
            IvpConfig {
                abs_tol: 0.0,
                ..base
            },
            IvpConfig {
                rel_tol: -1.0,
                ..base
            },
            IvpConfig {
                h_min: 0.1,
                h_init: 0.01,
                ..base
            },
            IvpConfig {
                max_steps: 0,
                ..base
            },
        ] {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        base.validate().unwrap();
    }
}
