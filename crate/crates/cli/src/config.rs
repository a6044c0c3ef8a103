//! Run configuration: a flat TOML file.
//!
//! ```toml
//! q = "x"
//! a = 2.0
//! d = 1.0
//! N = 40
//! m = 6
//! mu_max = 4.0
//! ```
//!
//! Relative paths (`output_dir`, `cache_dir`) are resolved against the
//! directory holding the config file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use slrsm_core::expr::parse_potential;
use slrsm_core::sampling::SamplingConfig;
use slrsm_core::{IvpConfig, MethodRegistry, Problem};
use thiserror::Error;

pub const CACHE_ENV: &str = "SLRSM_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub q: String,
    pub a: f64,
    pub d: f64,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    #[serde(default = "default_m")]
    pub m: u32,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub mu_max: Option<f64>,
    #[serde(default = "default_scan_step")]
    pub scan_step: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_grid_pts")]
    pub grid_pts: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default = "default_true")]
    pub run_oracle: bool,
    #[serde(default)]
    pub cache_dir: Option<String>,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_ivp_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_ivp_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_oracle_ivp_tol")]
    pub oracle_ivp_tol: f64,
    #[serde(default = "default_fit_points")]
    pub fit_points: usize,
}

fn default_n() -> usize {
    40
}
fn default_m() -> u32 {
    6
}
fn default_scan_step() -> f64 {
    slrsm_core::roots::DEFAULT_SCAN_STEP
}
fn default_tol() -> f64 {
    slrsm_core::roots::DEFAULT_TOL
}
fn default_grid_pts() -> usize {
    513
}
fn default_output_dir() -> String {
    "slrsm-out".into()
}
fn default_true() -> bool {
    true
}
fn default_method() -> String {
    "rsm".into()
}
fn default_ivp_tol() -> f64 {
    1e-12
}
fn default_oracle_ivp_tol() -> f64 {
    1e-13
}
fn default_fit_points() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid configuration:\n{}", .0.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<FieldError>),
}

impl ConfigError {
    pub fn fields(&self) -> Vec<&'static str> {
        match self {
            ConfigError::Invalid(errs) => errs.iter().map(|e| e.field).collect(),
            _ => Vec::new(),
        }
    }
}

/// A parsed config together with the directory its relative paths refer to.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config = RunConfig::from_toml(&text).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, base_dir })
    }

    pub fn output_dir(&self) -> PathBuf {
        self.base_dir.join(&self.config.output_dir)
    }

    /// `SLRSM_CACHE_DIR` wins over the config file, which wins over the
    /// default `.slrsm-cache` next to the config.
    pub fn cache_dir(&self, env_override: Option<&str>) -> PathBuf {
        resolve_cache_dir(
            &self.base_dir,
            self.config.cache_dir.as_deref(),
            env_override,
        )
    }
}

pub fn resolve_cache_dir(
    base_dir: &Path,
    configured: Option<&str>,
    env_override: Option<&str>,
) -> PathBuf {
    match (env_override.filter(|s| !s.is_empty()), configured) {
        (Some(env), _) => PathBuf::from(env),
        (None, Some(dir)) => base_dir.join(dir),
        (None, None) => base_dir.join(".slrsm-cache"),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::new(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errs = Vec::new();
        let mut bad =
            |field: &'static str, message: String| errs.push(FieldError { field, message });

        if let Err(e) = parse_potential(&self.q) {
            bad("q", e.to_string());
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            bad("a", format!("must be positive, got {}", self.a));
        }
        if !(self.d > 0.0 && self.d < std::f64::consts::PI) {
            bad("d", format!("must lie in (0, pi), got {}", self.d));
        }
        if self.n < 8 {
            bad("N", format!("must be at least 8, got {}", self.n));
        }
        if self.m < 2 {
            bad("m", format!("must be at least 2, got {}", self.m));
        }
        if let Some(theta) = self.theta {
            if !(theta > 0.0 && theta.is_finite()) {
                bad("theta", format!("must be positive, got {theta}"));
            }
        } else if self.n <= self.m as usize {
            bad(
                "theta",
                format!(
                    "default sigma0/(N-m) needs N > m (N = {}, m = {})",
                    self.n, self.m
                ),
            );
        }
        if let Some(mu_max) = self.mu_max {
            if !(mu_max > 0.0 && mu_max.is_finite()) {
                bad("mu_max", format!("must be positive, got {mu_max}"));
            }
        }
        if !(self.scan_step > 0.0 && self.scan_step.is_finite()) {
            bad(
                "scan_step",
                format!("must be positive, got {}", self.scan_step),
            );
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            bad("tol", format!("must be positive, got {}", self.tol));
        }
        if self.grid_pts < slrsm_core::eigen::MIN_GRID_POINTS {
            bad(
                "grid_pts",
                format!(
                    "must be at least {}, got {}",
                    slrsm_core::eigen::MIN_GRID_POINTS,
                    self.grid_pts
                ),
            );
        }
        for (field, value) in [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("oracle_ivp_tol", self.oracle_ivp_tol),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                bad(field, format!("must be positive, got {value}"));
            }
        }
        if self.fit_points == 0 {
            bad("fit_points", "must be at least 1".into());
        }
        if self.output_dir.is_empty() {
            bad("output_dir", "must not be empty".into());
        }
        let registry = MethodRegistry::default();
        if !registry.contains(&self.method) {
            bad(
                "method",
                format!(
                    "unknown method '{}' (available: {})",
                    self.method,
                    registry.names().join(", ")
                ),
            );
        }

        if errs.is_empty() {
            // cross-field: explicit mu_max must stay inside the search band
            if let (Some(mu_max), Ok(cfg)) = (self.mu_max, self.sampling()) {
                if self.method == "rsm" && mu_max > cfg.search_limit() {
                    errs.push(FieldError {
                        field: "mu_max",
                        message: format!(
                            "{mu_max} exceeds 0.9 N pi / sigma = {}",
                            cfg.search_limit()
                        ),
                    });
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errs))
        }
    }

    pub fn problem(&self) -> slrsm_core::Result<Problem> {
        let p = Problem::parse(&self.q, self.a, self.d)?;
        Ok(match &self.label {
            Some(label) => p.with_label(label.clone()),
            None => p,
        })
    }

    pub fn sampling(&self) -> slrsm_core::Result<SamplingConfig> {
        SamplingConfig::new(self.n, self.m, self.d, self.theta)
    }

    pub fn ivp(&self) -> IvpConfig {
        IvpConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            ..IvpConfig::default()
        }
    }

    pub fn oracle_ivp(&self) -> IvpConfig {
        IvpConfig::with_tolerance(self.oracle_ivp_tol)
    }

    pub fn mu_max(&self) -> slrsm_core::Result<f64> {
        match self.mu_max {
            Some(v) => Ok(v),
            None => Ok(self.sampling()?.search_limit()),
        }
    }
}
