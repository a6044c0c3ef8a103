//! Regularized boundary functions and their cardinal-series reconstruction.
//!
//! With `r(mu) = sinc(theta mu)^m` the four functions
//!
//! ```text
//! h11 = r (y_L(d) - cos(mu d))
//! h12 = r (y_L'(d) + mu sin(mu d))
//! h21 = r (y_R(d) + sin(mu (pi - d)) / mu)
//! h22 = r (y_R'(d) - cos(mu (pi - d)))
//! ```
//!
//! are band-limited with type `sigma = sigma0 + m theta`, so they are
//! recovered from samples at `mu_j = j pi / sigma`. All four are even in `mu`;
//! only `j = 0..=N` is stored.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{boundary_quad, BoundaryQuad};
use crate::error::{Error, Result};
use crate::ivp::IvpConfig;
use crate::problem::Problem;

pub const TABLE_FORMAT_VERSION: u32 = 1;

/// Exact-node tolerance for the cardinal series.
const NODE_HIT: f64 = 1e-13;
/// Smallest admissible |sinc(theta mu)| before de-regularization.
pub const REGULARIZER_FLOOR: f64 = 1e-8;
/// Fraction of the band `N pi / sigma` used for root searches.
pub const SEARCH_FRACTION: f64 = 0.9;

/// `sin(x) / x`, with the series `1 - x^2/6 + x^4/120` near the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `sin(mu L) / mu`, finite at `mu = 0`.
fn sin_over(mu: f64, len: f64) -> f64 {
    len * sinc(mu * len)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    H11,
    H12,
    H21,
    H22,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::H11,
        Component::H12,
        Component::H21,
        Component::H22,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Truncation index: samples `j = -N..=N`.
    pub n: usize,
    /// Power of the sinc regularizer.
    pub m: u32,
    pub d: f64,
    pub sigma0: f64,
    pub theta: f64,
    pub sigma: f64,
}

impl SamplingConfig {
    /// `theta = None` selects `sigma0 / (N - m)`, which puts the first zero
    /// of the regularizer exactly on the band edge `N pi / sigma`.
    pub fn new(n: usize, m: u32, d: f64, theta: Option<f64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidSamplingConfig(msg));
        if n < 8 {
            return bad(format!("N must be at least 8, got {n}"));
        }
        if m < 2 {
            return bad(format!("m must be at least 2, got {m}"));
        }
        if !(d > 0.0 && d < PI) {
            return bad(format!("d must lie in (0, pi), got {d}"));
        }
        let sigma0 = d.max(PI - d);
        let theta = match theta {
            Some(t) => t,
            None if n > m as usize => sigma0 / (n - m as usize) as f64,
            None => return bad(format!("default theta needs N > m (N = {n}, m = {m})")),
        };
        if !(theta > 0.0 && theta.is_finite()) {
            return bad(format!("theta must be positive, got {theta}"));
        }
        Ok(Self {
            n,
            m,
            d,
            sigma0,
            theta,
            sigma: sigma0 + m as f64 * theta,
        })
    }

    /// Rechecks the derived fields, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        let fresh = Self::new(self.n, self.m, self.d, Some(self.theta))?;
        if fresh.sigma0 != self.sigma0 || fresh.sigma != self.sigma {
            return Err(Error::InvalidSamplingConfig(format!(
                "inconsistent sigma0/sigma ({}, {}) for d = {}, m = {}, theta = {}",
                self.sigma0, self.sigma, self.d, self.m, self.theta
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        PI / self.sigma
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * PI / self.sigma
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|j| self.node(j)).collect()
    }

    /// `N pi / sigma`; the truncated series is only trusted strictly inside.
    pub fn band_edge(&self) -> f64 {
        self.n as f64 * PI / self.sigma
    }

    /// Default upper end of root searches.
    pub fn search_limit(&self) -> f64 {
        SEARCH_FRACTION * self.band_edge()
    }

    /// `sinc(theta mu)^m`.
    pub fn regularizer(&self, mu: f64) -> f64 {
        sinc(self.theta * mu).powi(self.m as i32)
    }

    /// Position of the first zero of the regularizer, `pi / theta`.
    pub fn first_singularity(&self) -> f64 {
        PI / self.theta
    }

    fn check_band(&self, mu: f64) -> Result<()> {
        let edge = self.band_edge();
        if mu.abs() < edge {
            Ok(())
        } else {
            Err(Error::OutOfBand { mu, edge })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTable {
    pub format_version: u32,
    pub config: SamplingConfig,
    pub nodes: Vec<f64>,
    pub h11: Vec<f64>,
    pub h12: Vec<f64>,
    pub h21: Vec<f64>,
    pub h22: Vec<f64>,
    /// Identifies the problem, integrator and sampling settings the samples
    /// came from; empty for synthetic tables.
    pub problem_hash: String,
}

impl SampleTable {
    /// A table from externally supplied samples at `j = 0..=N`.
    pub fn from_samples(config: SamplingConfig, samples: [Vec<f64>; 4]) -> Result<Self> {
        let [h11, h12, h21, h22] = samples;
        let table = Self {
            format_version: TABLE_FORMAT_VERSION,
            nodes: config.nodes(),
            config,
            h11,
            h12,
            h21,
            h22,
            problem_hash: String::new(),
        };
        table.validate()?;
        Ok(table)
    }

    pub fn with_hash(mut self, hash: impl Into<String>) -> Self {
        self.problem_hash = hash.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.format_version != TABLE_FORMAT_VERSION {
            return Err(Error::InvalidSamplingConfig(format!(
                "unsupported table format version {}",
                self.format_version
            )));
        }
        let len = self.config.n + 1;
        if self.nodes != self.config.nodes() {
            return Err(Error::InvalidSamplingConfig(
                "node list does not match the configuration".into(),
            ));
        }
        for c in Component::ALL {
            let h = self.samples(c);
            if h.len() != len {
                return Err(Error::InvalidSamplingConfig(format!(
                    "{c:?} has {} samples, expected {len}",
                    h.len()
                )));
            }
            if h.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSamplingConfig(format!(
                    "{c:?} contains non-finite samples"
                )));
            }
        }
        Ok(())
    }

    pub fn samples(&self, which: Component) -> &[f64] {
        match which {
            Component::H11 => &self.h11,
            Component::H12 => &self.h12,
            Component::H21 => &self.h21,
            Component::H22 => &self.h22,
        }
    }
}

/// Regularized values `(h11, h12, h21, h22)` of a directly computed quad.
pub fn regularize(quad: &BoundaryQuad, cfg: &SamplingConfig) -> [f64; 4] {
    let mu = quad.mu;
    let d = cfg.d;
    let r = cfg.regularizer(mu);
    [
        r * (quad.y_left - (mu * d).cos()),
        r * (quad.dy_left + mu * (mu * d).sin()),
        r * (quad.y_right + sin_over(mu, PI - d)),
        r * (quad.dy_right - (mu * (PI - d)).cos()),
    ]
}

/// Integrates both base problems at every node `mu_0..mu_N` in parallel.
pub fn build_sample_table(
    problem: &Problem,
    cfg: &SamplingConfig,
    ivp: &IvpConfig,
) -> Result<SampleTable> {
    problem.validate()?;
    if problem.d != cfg.d {
        return Err(Error::InvalidSamplingConfig(format!(
            "sampling d = {} differs from problem d = {}",
            cfg.d, problem.d
        )));
    }
    let rows = cfg
        .nodes()
        .into_par_iter()
        .map(|mu| {
            boundary_quad(&problem.potential, mu, cfg.d, ivp).map(|quad| regularize(&quad, cfg))
        })
        .collect::<Result<Vec<_>>>()?;
    let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    SampleTable::from_samples(*cfg, [column(0), column(1), column(2), column(3)])
}

/// Truncated cardinal series `sum_{j=-N}^{N} h(mu_j) sinc(sigma (mu - mu_j))`.
pub fn cardinal_series(table: &SampleTable, which: Component, mu: f64) -> Result<f64> {
    let cfg = &table.config;
    let h = table.samples(which);
    // h is even, and mu_{-j} pairs with mu_j
    let mu = mu.abs();
    let step = cfg.spacing();
    // node hits are exact, including the edge node mu_N
    let nearest = (mu / step).round() as usize;
    if nearest <= cfg.n && (mu - table.nodes[nearest]).abs() < NODE_HIT {
        return Ok(h[nearest]);
    }
    cfg.check_band(mu)?;
    let s = cfg.sigma;
    let mut sum = h[0] * sinc(s * mu);
    for (&hj, &node) in h.iter().zip(&table.nodes).skip(1) {
        sum += hj * (sinc(s * (mu - node)) + sinc(s * (mu + node)));
    }
    Ok(sum)
}

fn regularizer_checked(cfg: &SamplingConfig, mu: f64) -> Result<f64> {
    let value = sinc(cfg.theta * mu);
    if value.abs() < REGULARIZER_FLOOR {
        return Err(Error::SingularRegularizer { mu, value });
    }
    Ok(value.powi(cfg.m as i32))
}

/// Boundary values recovered from the reconstructed `h_kl`.
pub fn reconstruct_quad(table: &SampleTable, mu: f64) -> Result<BoundaryQuad> {
    let cfg = &table.config;
    cfg.check_band(mu)?;
    let r = regularizer_checked(cfg, mu)?;
    let d = cfg.d;
    let h = |c| cardinal_series(table, c, mu);
    Ok(BoundaryQuad {
        mu,
        y_left: h(Component::H11)? / r + (mu * d).cos(),
        dy_left: h(Component::H12)? / r - mu * (mu * d).sin(),
        y_right: h(Component::H21)? / r - sin_over(mu, PI - d),
        dy_right: h(Component::H22)? / r + (mu * (PI - d)).cos(),
    })
}

/// Approximate characteristic function `B_N(mu)`.
pub fn characteristic(table: &SampleTable, a: f64, mu: f64) -> Result<f64> {
    Ok(reconstruct_quad(table, mu)?.determinant(a))
}

/// Sample estimate of `|| mu^{m-1} h(mu) ||_2` over the real line, by the
/// Riemann sum with spacing `pi / sigma` over `j = -N..=N`.
pub fn weighted_sample_norm(table: &SampleTable, which: Component) -> f64 {
    let cfg = &table.config;
    let p = cfg.m as i32 - 1;
    let h = table.samples(which);
    let tail: f64 = (1..=cfg.n)
        .map(|j| (table.nodes[j].powi(p) * h[j]).powi(2))
        .sum();
    // mu_0^{m-1} h_0 = 0 for m >= 2
    (cfg.spacing() * 2.0 * tail).sqrt()
}

/// Common factor of the truncation and characteristic-function bounds:
///
/// ```text
/// |sin(sigma mu)| / (pi (pi/sigma)^{m-1} sqrt(1 - 4^{1-m}))
///   * [ (N pi/sigma - mu)^{-1/2} + (N pi/sigma + mu)^{-1/2} ] / (N+1)^{m-1}
/// ```
pub fn jagerman_factor(cfg: &SamplingConfig, mu: f64) -> Result<f64> {
    cfg.check_band(mu)?;
    let r = cfg.m as i32 - 1;
    let edge = cfg.band_edge();
    let spacing = cfg.spacing();
    let lead = (cfg.sigma * mu).sin().abs() / (PI * spacing.powi(r) * (1.0 - 4f64.powi(-r)).sqrt());
    let tails = 1.0 / (edge - mu).sqrt() + 1.0 / (edge + mu).sqrt();
    Ok(lead * tails / ((cfg.n + 1) as f64).powi(r))
}

/// Upper bound on `|h(mu) - h^[N](mu)|` using the sample estimate of the
/// weighted norm.
pub fn truncation_bound(table: &SampleTable, which: Component, mu: f64) -> Result<f64> {
    Ok(weighted_sample_norm(table, which) * jagerman_factor(&table.config, mu)?)
}

/// Same bound with a caller-supplied norm `|| mu^{m-1} h ||_2`.
pub fn truncation_bound_with_norm(cfg: &SamplingConfig, norm: f64, mu: f64) -> Result<f64> {
    Ok(norm * jagerman_factor(cfg, mu)?)
}
