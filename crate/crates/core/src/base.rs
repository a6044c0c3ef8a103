//! Base solutions `y_L` (data at 0) and `y_R` (data at pi) and their values
//! at the interface `d`.
//!
//! `mu` only ever enters through `mu * mu`, so every routine here is even in
//! `mu` bit for bit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::PotentialExpr;
use crate::ivp::{integrate, IvpConfig, IvpState};

/// `y_L(d)`, `y_L'(d)`, `y_R(d)`, `y_R'(d)` at one `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryQuad {
    pub mu: f64,
    pub y_left: f64,
    pub dy_left: f64,
    pub y_right: f64,
    pub dy_right: f64,
}

impl BoundaryQuad {
    /// `a y_L y_R' - a^{-1} y_L' y_R`.
    pub fn determinant(&self, a: f64) -> f64 {
        a * self.y_left * self.dy_right - self.dy_left * self.y_right / a
    }

    /// Neither side may vanish together with its derivative.
    pub fn is_nondegenerate(&self) -> bool {
        (self.y_left != 0.0 || self.dy_left != 0.0) && (self.y_right != 0.0 || self.dy_right != 0.0)
    }
}

fn check_interface(d: f64) -> Result<()> {
    if d > 0.0 && d < PI {
        Ok(())
    } else {
        Err(Error::InvalidProblem(format!(
            "d must lie in (0, pi), got {d}"
        )))
    }
}

/// `(y_L(d), y_L'(d))` with `y_L(0) = 1`, `y_L'(0) = 0`.
pub fn solve_left(q: &PotentialExpr, mu: f64, d: f64, cfg: &IvpConfig) -> Result<(f64, f64)> {
    check_interface(d)?;
    let t = integrate(q, mu * mu, 0.0, d, (1.0, 0.0), cfg, &[])?;
    Ok((t.last.u, t.last.v))
}

/// `(y_R(d), y_R'(d))` with `y_R(pi) = 0`, `y_R'(pi) = 1`.
pub fn solve_right(q: &PotentialExpr, mu: f64, d: f64, cfg: &IvpConfig) -> Result<(f64, f64)> {
    check_interface(d)?;
    let t = integrate(q, mu * mu, PI, d, (0.0, 1.0), cfg, &[])?;
    Ok((t.last.u, t.last.v))
}

pub fn boundary_quad(q: &PotentialExpr, mu: f64, d: f64, cfg: &IvpConfig) -> Result<BoundaryQuad> {
    let (y_left, dy_left) = solve_left(q, mu, d, cfg)?;
    let (y_right, dy_right) = solve_right(q, mu, d, cfg)?;
    Ok(BoundaryQuad {
        mu,
        y_left,
        dy_left,
        y_right,
        dy_right,
    })
}

/// `y_L` sampled on `grid`, which must lie inside `[0, d]`.
pub fn trajectory_left(
    q: &PotentialExpr,
    mu: f64,
    d: f64,
    cfg: &IvpConfig,
    grid: &[f64],
) -> Result<Vec<IvpState>> {
    check_interface(d)?;
    Ok(integrate(q, mu * mu, 0.0, d, (1.0, 0.0), cfg, grid)?.states)
}

/// `y_R` sampled on `grid`, which must lie inside `[d, pi]`.
pub fn trajectory_right(
    q: &PotentialExpr,
    mu: f64,
    d: f64,
    cfg: &IvpConfig,
    grid: &[f64],
) -> Result<Vec<IvpState>> {
    check_interface(d)?;
    Ok(integrate(q, mu * mu, PI, d, (0.0, 1.0), cfg, grid)?.states)
}

/// `n` equally spaced points from `lo` to `hi`, both ends included exactly.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a grid needs at least two points");
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * h })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(src: &str) -> PotentialExpr {
        PotentialExpr::parse(src).unwrap()
    }

    #[test]
    fn left_free_solution() {
        let cfg = IvpConfig::default();
        let (y, dy) = solve_left(&q("0"), 2.0, 1.0, &cfg).unwrap();
        assert!((y - 2.0f64.cos()).abs() < 1e-10);
        assert!((dy + 2.0 * 2.0f64.sin()).abs() < 1e-10);
        assert_eq!(solve_left(&q("0"), 0.0, 1.0, &cfg).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn right_free_solution() {
        let cfg = IvpConfig::default();
        let (y, dy) = solve_right(&q("0"), 2.0, 1.0, &cfg).unwrap();
        assert!((y + (2.0 * (PI - 1.0)).sin() / 2.0).abs() < 1e-10);
        assert!((dy - (2.0 * (PI - 1.0)).cos()).abs() < 1e-10);
        let (y, dy) = solve_right(&q("0"), 0.0, 1.0, &cfg).unwrap();
        assert!((y + (PI - 1.0)).abs() < 1e-12);
        assert!((dy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_potential_against_tighter_run() {
        let cfg = IvpConfig::default();
        let fine = cfg.tightened(100.0);
        let p = q("x");
        let (a, b) = (
            solve_left(&p, 1.0, 1.0, &cfg).unwrap(),
            solve_left(&p, 1.0, 1.0, &fine).unwrap(),
        );
        assert!((a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10);
        let (a, b) = (
            solve_right(&p, 1.5, 1.0, &cfg).unwrap(),
            solve_right(&p, 1.5, 1.0, &fine).unwrap(),
        );
        assert!((a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10);
    }

    #[test]
    fn trajectories_on_grids() {
        let cfg = IvpConfig::default();
        let grid = uniform_grid(0.0, 1.0, 11);
        let left = trajectory_left(&q("0"), 0.5, 1.0, &cfg, &grid).unwrap();
        for (x, s) in grid.iter().zip(&left) {
            assert!((s.u - (0.5 * x).cos()).abs() < 1e-10);
        }
        let grid = uniform_grid(1.0, PI, 11);
        let right = trajectory_right(&q("0"), 0.0, 1.0, &cfg, &grid).unwrap();
        for (x, s) in grid.iter().zip(&right) {
            assert!((s.u + (PI - x)).abs() < 1e-10);
        }
    }

    #[test]
    fn evenness_is_bitwise() {
        let cfg = IvpConfig::default();
        let p = q("x*x - cos(x)");
        for mu in [0.3, 1.7, 5.25, 12.0] {
            assert_eq!(
                boundary_quad(&p, mu, 1.2, &cfg)
                    .unwrap()
                    .determinant(2.0)
                    .to_bits(),
                boundary_quad(&p, -mu, 1.2, &cfg)
                    .unwrap()
                    .determinant(2.0)
                    .to_bits()
            );
            assert_eq!(
                solve_left(&p, mu, 1.2, &cfg).unwrap(),
                solve_left(&p, -mu, 1.2, &cfg).unwrap()
            );
        }
    }

    #[test]
    fn rejects_interface_outside_interval() {
        let cfg = IvpConfig::default();
        assert!(solve_left(&q("0"), 1.0, 0.0, &cfg).is_err());
        assert!(solve_right(&q("0"), 1.0, PI, &cfg).is_err());
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = uniform_grid(1.0, PI, 513);
        assert_eq!(g.len(), 513);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[512], PI);
    }
}
