//! Eigenvalues of Sturm-Liouville problems with an interior transmission
//! condition,
//!
//! ```text
//! -y'' + q(x) y = mu^2 y,   0 < x < pi
//! y'(0) = 0 = y(pi)
//! y(d+0) = a y(d-0),  y'(d+0) = a^{-1} y'(d-0)
//! ```
//!
//! computed with the regularized sampling method: the boundary values of
//! two base solutions are multiplied by `sinc(theta mu)^m`, sampled on a
//! uniform `mu` grid, rebuilt with a truncated cardinal series, and the
//! zeros of the rebuilt characteristic determinant are bracketed and
//! bisected.

pub mod base;
pub mod eigen;
pub mod error;
pub mod expr;
pub mod ivp;
pub mod method;
pub mod oracle;
pub mod problem;
pub mod roots;
pub mod sampling;

pub use base::BoundaryQuad;
pub use eigen::Eigenpair;
pub use error::{Error, Result};
pub use expr::PotentialExpr;
pub use ivp::IvpConfig;
pub use method::{CharacteristicFunction, MethodContext, MethodRegistry};
pub use oracle::OracleResult;
pub use problem::Problem;
pub use roots::{RootResult, ScanOutcome};
pub use sampling::{SampleTable, SamplingConfig};
