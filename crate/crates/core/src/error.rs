use thiserror::Error;

use crate::expr::ExprError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("step size underflow at x = {x}: required step {step:e} below minimum {h_min:e}")]
    StepSizeUnderflow { x: f64, step: f64, h_min: f64 },

    #[error("exceeded {max_steps} integration steps before reaching x = {target}")]
    MaxStepsExceeded { max_steps: usize, target: f64 },

    #[error("non-finite state at x = {x}")]
    NonFiniteState { x: f64 },

    #[error("invalid integrator configuration: {0}")]
    InvalidIvpConfig(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid sampling configuration: {0}")]
    InvalidSamplingConfig(String),

    #[error("mu = {mu} lies outside the reconstruction band |mu| < {edge}")]
    OutOfBand { mu: f64, edge: f64 },

    #[error("regularizer sinc(theta*mu) vanishes at mu = {mu} (|sinc| = {value:e})")]
    SingularRegularizer { mu: f64, value: f64 },

    #[error("mu_max = {mu_max} exceeds the usable band {limit}")]
    BandExceeded { mu_max: f64, limit: f64 },

    #[error("invalid scan parameters: {0}")]
    InvalidScan(String),

    #[error("|B'(mu)| = {derivative:e} at mu = {mu} is too small for an error estimate")]
    DerivativeTooSmall { mu: f64, derivative: f64 },

    #[error("both y_R(d) and y_R'(d) vanish at mu = {mu}; cannot scale the right solution")]
    DegenerateAlpha { mu: f64 },

    #[error("eigenfunction grids do not match: {0}")]
    GridMismatch(String),

    #[error("unknown method '{name}' (available: {available})")]
    UnknownMethod { name: String, available: String },

    #[error("method '{method}' cannot be built: {reason}")]
    MethodUnavailable { method: String, reason: String },
}
