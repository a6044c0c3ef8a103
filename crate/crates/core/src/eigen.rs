//! Piecewise eigenfunctions `y = y_L` on `[0, d]`, `y = alpha y_R` on `[d, pi]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::base::{trajectory_left, trajectory_right, uniform_grid};
use crate::error::{Error, Result};
use crate::ivp::{IvpConfig, IvpState};
use crate::problem::Problem;

pub const MIN_GRID_POINTS: usize = 16;
const DEGENERATE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridValue {
    pub x: f64,
    pub y: f64,
    pub dy: f64,
}

impl From<IvpState> for GridValue {
    fn from(s: IvpState) -> Self {
        Self {
            x: s.x,
            y: s.u,
            dy: s.v,
        }
    }
}

/// Unnormalized eigenfunction (`y(0) = 1`) on uniform grids; both grids
/// contain `x = d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub index: usize,
    pub mu: f64,
    pub eigenvalue: f64,
    pub alpha: f64,
    pub left: Vec<GridValue>,
    pub right: Vec<GridValue>,
    pub l2_norm: f64,
}

impl Eigenpair {
    pub fn scaled(&self, c: f64) -> Self {
        let scale = |v: &GridValue| GridValue {
            x: v.x,
            y: c * v.y,
            dy: c * v.dy,
        };
        Self {
            alpha: c * self.alpha,
            left: self.left.iter().map(scale).collect(),
            right: self.right.iter().map(scale).collect(),
            l2_norm: c.abs() * self.l2_norm,
            ..self.clone()
        }
    }

    /// `(y(d-0), y'(d-0))`.
    pub fn left_limit(&self) -> GridValue {
        *self.left.last().expect("non-empty grid")
    }

    /// `(y(d+0), y'(d+0))`.
    pub fn right_limit(&self) -> GridValue {
        self.right[0]
    }

    pub fn transmission(&self, a: f64) -> TransmissionCheck {
        let (l, r) = (self.left_limit(), self.right_limit());
        let y_scale = self
            .left
            .iter()
            .chain(&self.right)
            .map(|v| v.y.abs())
            .fold(0.0, f64::max);
        let dy_scale = self
            .left
            .iter()
            .chain(&self.right)
            .map(|v| v.dy.abs())
            .fold(0.0, f64::max);
        TransmissionCheck {
            value_ratio: r.y / l.y,
            slope_ratio: r.dy / l.dy,
            value_defect: (r.y - a * l.y).abs() / y_scale,
            slope_defect: (r.dy - l.dy / a).abs() / dy_scale,
        }
    }
}

/// Jump data at `x = d`. Defects are scaled by the largest `|y|` (resp.
/// `|y'|`) on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionCheck {
    pub value_ratio: f64,
    pub slope_ratio: f64,
    pub value_defect: f64,
    pub slope_defect: f64,
}

/// Builds the eigenfunction for a refined zero `mu` from the base solutions.
pub fn assemble_eigenfunction(
    problem: &Problem,
    index: usize,
    mu: f64,
    grid_pts: usize,
    ivp: &IvpConfig,
) -> Result<Eigenpair> {
    if grid_pts < MIN_GRID_POINTS {
        return Err(Error::GridMismatch(format!(
            "need at least {MIN_GRID_POINTS} points per side, got {grid_pts}"
        )));
    }
    let d = problem.d;
    let q = &problem.potential;
    let a = problem.a;
    let left_grid = uniform_grid(0.0, d, grid_pts);
    let right_grid = uniform_grid(d, PI, grid_pts);
    let left: Vec<GridValue> = trajectory_left(q, mu, d, ivp, &left_grid)?
        .into_iter()
        .map(Into::into)
        .collect();
    let right_raw = trajectory_right(q, mu, d, ivp, &right_grid)?;

    let at_d = left[grid_pts - 1];
    let (y_r, dy_r) = (right_raw[0].u, right_raw[0].v);
    // choose the better conditioned of the two matching conditions
    let alpha = if y_r.abs() >= dy_r.abs() {
        if y_r.abs() < DEGENERATE {
            return Err(Error::DegenerateAlpha { mu });
        }
        a * at_d.y / y_r
    } else {
        if dy_r.abs() < DEGENERATE {
            return Err(Error::DegenerateAlpha { mu });
        }
        at_d.dy / (a * dy_r)
    };
    let right: Vec<GridValue> = right_raw
        .into_iter()
        .map(|s| GridValue {
            x: s.x,
            y: alpha * s.u,
            dy: alpha * s.v,
        })
        .collect();

    let mut pair = Eigenpair {
        index,
        mu,
        eigenvalue: mu * mu,
        alpha,
        left,
        right,
        l2_norm: 0.0,
    };
    pair.l2_norm = inner_product(&pair, &pair)?.sqrt();
    Ok(pair)
}

/// Both matching conditions give an `alpha`; at an exact zero they coincide.
pub fn alpha_candidates(problem: &Problem, pair: &Eigenpair) -> (f64, f64) {
    let l = pair.left_limit();
    let r = pair.right_limit();
    // right side already carries alpha; undo it
    let (y_r, dy_r) = (r.y / pair.alpha, r.dy / pair.alpha);
    (problem.a * l.y / y_r, l.dy / (problem.a * dy_r))
}

/// Composite Simpson on uniform samples; an even sample count ends with a
/// 3/8 panel.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let (body, tail) = if n % 2 == 1 {
                (n, 0.0)
            } else {
                (n - 3, three_eighths(&values[n - 4..], h))
            };
            let mut s = values[0] + values[body - 1];
            for (i, v) in values[1..body - 1].iter().enumerate() {
                s += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
            }
            h / 3.0 * s + tail
        }
    }
}

fn three_eighths(v: &[f64], h: f64) -> f64 {
    3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3])
}

fn same_grid(a: &[GridValue], b: &[GridValue]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| p.x == q.x)
}

fn spacing(side: &[GridValue]) -> f64 {
    (side[side.len() - 1].x - side[0].x) / (side.len() - 1) as f64
}

/// `int_0^pi y_i y_j dx`, integrating each side separately.
pub fn inner_product(p: &Eigenpair, q: &Eigenpair) -> Result<f64> {
    if !same_grid(&p.left, &q.left) || !same_grid(&p.right, &q.right) {
        return Err(Error::GridMismatch(format!(
            "eigenpairs {} and {} use different grids",
            p.index, q.index
        )));
    }
    let side = |a: &[GridValue], b: &[GridValue]| {
        let prod: Vec<f64> = a.iter().zip(b).map(|(u, v)| u.y * v.y).collect();
        simpson(&prod, spacing(a))
    };
    Ok(side(&p.left, &q.left) + side(&p.right, &q.right))
}

/// Symmetric matrix of pairwise inner products.
pub fn gram_matrix(pairs: &[Eigenpair]) -> Result<Vec<Vec<f64>>> {
    let n = pairs.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = inner_product(&pairs[i], &pairs[j])?;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

/// Largest `|G_ij| / sqrt(G_ii G_jj)` over `i != j`.
pub fn max_normalized_off_diagonal(g: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..g.len() {
        for j in 0..g.len() {
            if i != j {
                worst = worst.max(g[i][j].abs() / (g[i][i] * g[j][j]).sqrt());
            }
        }
    }
    worst
}

fn side_residual(problem: &Problem, mu_sq: f64, side: &[GridValue]) -> Result<f64> {
    let n = side.len();
    let h = spacing(side);
    let scale = side.iter().map(|v| v.y.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for i in 2..n - 2 {
        let y = |k: usize| side[k].y;
        let ypp = (-y(i - 2) + 16.0 * y(i - 1) - 30.0 * y(i) + 16.0 * y(i + 1) - y(i + 2))
            / (12.0 * h * h);
        let q = problem.potential.eval(side[i].x)?;
        worst = worst.max((-ypp + (q - mu_sq) * y(i)).abs());
    }
    Ok(worst / scale)
}

/// Max scaled residual of `-y'' + (q - mu^2) y` at interior grid points,
/// with `y''` from the five-point central difference; each side is scaled
/// by its own largest `|y|`.
pub fn residual_check(problem: &Problem, pair: &Eigenpair) -> Result<f64> {
    Ok(
        side_residual(problem, pair.eigenvalue, &pair.left)?.max(side_residual(
            problem,
            pair.eigenvalue,
            &pair.right,
        )?),
    )
}
