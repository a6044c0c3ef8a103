//! Reference characteristic function: direct integration of both base
//! problems at every `mu`, no sampling involved. For `q = 0` a closed form
//! is available as well.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::base::boundary_quad;
use crate::error::Result;
use crate::ivp::IvpConfig;
use crate::method::{ClosedFormCharacteristic, DirectCharacteristic};
use crate::problem::Problem;
use crate::roots::scan;

pub const ORACLE_TOL: f64 = 1e-12;

/// Integrator settings used for reference zeros.
pub fn oracle_ivp_config() -> IvpConfig {
    IvpConfig::with_tolerance(1e-13)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    DirectShooting,
    ClosedFormQ0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub zeros: Vec<f64>,
    pub scan_step: f64,
    pub tol: f64,
    pub method: OracleMethod,
}

/// `Delta(mu) = a y_L y_R' - a^{-1} y_L' y_R` at the interface.
pub fn delta_direct(problem: &Problem, mu: f64, ivp: &IvpConfig) -> Result<f64> {
    Ok(boundary_quad(&problem.potential, mu, problem.d, ivp)?.determinant(problem.a))
}

/// `Delta(mu)` for `q = 0`:
/// `a cos(mu d) cos(mu (pi-d)) - a^{-1} sin(mu d) sin(mu (pi-d))`.
pub fn closed_form_q0(a: f64, d: f64, mu: f64) -> f64 {
    let l = PI - d;
    // y_L' y_R = (-mu sin(mu d)) (-sin(mu l) / mu), kept finite at mu = 0
    a * (mu * d).cos() * (mu * l).cos() - (mu * d).sin() * (mu * l).sin() / a
}

pub fn find_zeros_direct(
    problem: &Problem,
    mu_max: f64,
    scan_step: f64,
    tol: f64,
    ivp: &IvpConfig,
) -> Result<OracleResult> {
    let f = DirectCharacteristic::new(problem.clone(), *ivp);
    let outcome = scan(&f, mu_max, scan_step, tol)?;
    Ok(OracleResult {
        zeros: outcome.roots.iter().map(|r| r.mu).collect(),
        scan_step,
        tol,
        method: OracleMethod::DirectShooting,
    })
}

pub fn find_zeros_closed_form(
    a: f64,
    d: f64,
    mu_max: f64,
    scan_step: f64,
    tol: f64,
) -> Result<OracleResult> {
    let f = ClosedFormCharacteristic::new(a, d);
    let outcome = scan(&f, mu_max, scan_step, tol)?;
    Ok(OracleResult {
        zeros: outcome.roots.iter().map(|r| r.mu).collect(),
        scan_step,
        tol,
        method: OracleMethod::ClosedFormQ0,
    })
}
