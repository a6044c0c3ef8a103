//! Characteristic-function evaluators behind one trait, selectable by name.
//!
//! | name             | evaluates                                              |
//! |------------------|--------------------------------------------------------|
//! | `rsm`            | `B_N(mu)` from a sample table (regularized sampling)   |
//! | `direct`         | `Delta(mu)` by integrating both base problems          |
//! | `closed_form_q0` | `Delta(mu)` in closed form, only for `q = 0`           |
//!
//! Every zero scan in the crate runs against `&dyn CharacteristicFunction`,
//! so additional evaluators only need a builder in the [`MethodRegistry`].

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::base::boundary_quad;
use crate::error::{Error, Result};
use crate::ivp::IvpConfig;
use crate::oracle::closed_form_q0;
use crate::problem::Problem;
use crate::sampling::{characteristic, SampleTable};

pub trait CharacteristicFunction: Send + Sync {
    fn name(&self) -> &str;

    fn eval(&self, mu: f64) -> Result<f64>;

    /// Largest `mu` a scan may reach, when the evaluator has a limit.
    fn search_limit(&self) -> Option<f64> {
        None
    }
}

pub struct SampledCharacteristic {
    table: Arc<SampleTable>,
    a: f64,
}

impl SampledCharacteristic {
    pub fn new(table: Arc<SampleTable>, a: f64) -> Self {
        Self { table, a }
    }

    pub fn table(&self) -> &SampleTable {
        &self.table
    }
}

impl CharacteristicFunction for SampledCharacteristic {
    fn name(&self) -> &str {
        "rsm"
    }

    fn eval(&self, mu: f64) -> Result<f64> {
        characteristic(&self.table, self.a, mu)
    }

    fn search_limit(&self) -> Option<f64> {
        Some(self.table.config.search_limit())
    }
}

pub struct DirectCharacteristic {
    problem: Problem,
    ivp: IvpConfig,
}

impl DirectCharacteristic {
    pub fn new(problem: Problem, ivp: IvpConfig) -> Self {
        Self { problem, ivp }
    }
}

impl CharacteristicFunction for DirectCharacteristic {
    fn name(&self) -> &str {
        "direct"
    }

    fn eval(&self, mu: f64) -> Result<f64> {
        Ok(
            boundary_quad(&self.problem.potential, mu, self.problem.d, &self.ivp)?
                .determinant(self.problem.a),
        )
    }
}

pub struct ClosedFormCharacteristic {
    a: f64,
    d: f64,
}

impl ClosedFormCharacteristic {
    pub fn new(a: f64, d: f64) -> Self {
        Self { a, d }
    }
}

impl CharacteristicFunction for ClosedFormCharacteristic {
    fn name(&self) -> &str {
        "closed_form_q0"
    }

    fn eval(&self, mu: f64) -> Result<f64> {
        Ok(closed_form_q0(self.a, self.d, mu))
    }
}

/// What a builder may draw on.
pub struct MethodContext<'a> {
    pub problem: &'a Problem,
    pub ivp: IvpConfig,
    pub table: Option<Arc<SampleTable>>,
}

pub type MethodBuilder = fn(&MethodContext<'_>) -> Result<Box<dyn CharacteristicFunction>>;

pub struct MethodRegistry {
    builders: BTreeMap<String, MethodBuilder>,
}

impl Default for MethodRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register("rsm", build_rsm);
        registry.register("direct", build_direct);
        registry.register("closed_form_q0", build_closed_form);
        registry
    }
}

impl MethodRegistry {
    pub fn empty() -> Self {
        Self {
            builders: BTreeMap::new(),
        }
    }

    /// Adds or replaces the builder registered under `name`.
    pub fn register(&mut self, name: &str, builder: MethodBuilder) {
        self.builders.insert(name.to_string(), builder);
    }

    pub fn names(&self) -> Vec<&str> {
        self.builders.keys().map(String::as_str).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.builders.contains_key(name)
    }

    pub fn build(
        &self,
        name: &str,
        ctx: &MethodContext<'_>,
    ) -> Result<Box<dyn CharacteristicFunction>> {
        let builder = self
            .builders
            .get(name)
            .ok_or_else(|| Error::UnknownMethod {
                name: name.to_string(),
                available: self.names().join(", "),
            })?;
        builder(ctx)
    }
}

fn build_rsm(ctx: &MethodContext<'_>) -> Result<Box<dyn CharacteristicFunction>> {
    let table = ctx.table.clone().ok_or_else(|| Error::MethodUnavailable {
        method: "rsm".into(),
        reason: "no sample table supplied".into(),
    })?;
    if table.config.d != ctx.problem.d {
        return Err(Error::MethodUnavailable {
            method: "rsm".into(),
            reason: format!(
                "table built for d = {}, problem has d = {}",
                table.config.d, ctx.problem.d
            ),
        });
    }
    Ok(Box::new(SampledCharacteristic::new(table, ctx.problem.a)))
}

fn build_direct(ctx: &MethodContext<'_>) -> Result<Box<dyn CharacteristicFunction>> {
    ctx.ivp.validate()?;
    Ok(Box::new(DirectCharacteristic::new(
        ctx.problem.clone(),
        ctx.ivp,
    )))
}

fn build_closed_form(ctx: &MethodContext<'_>) -> Result<Box<dyn CharacteristicFunction>> {
    if !ctx.problem.potential.is_zero() {
        return Err(Error::MethodUnavailable {
            method: "closed_form_q0".into(),
            reason: format!("requires q = 0, got q = {}", ctx.problem.potential.source()),
        });
    }
    Ok(Box::new(ClosedFormCharacteristic::new(
        ctx.problem.a,
        ctx.problem.d,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_builds_every_method() {
        let registry = MethodRegistry::default();
        assert_eq!(registry.names(), vec!["closed_form_q0", "direct", "rsm"]);
        let p = Problem::parse("0", 2.0, 1.0).unwrap();
        let cfg = crate::sampling::SamplingConfig::new(20, 4, 1.0, None).unwrap();
        let table = crate::sampling::build_sample_table(&p, &cfg, &IvpConfig::default()).unwrap();
        let ctx = MethodContext {
            problem: &p,
            ivp: IvpConfig::default(),
            table: Some(Arc::new(table)),
        };
        let values: Vec<f64> = registry
            .names()
            .iter()
            .map(|n| {
                let f = registry.build(n, &ctx).unwrap();
                assert_eq!(f.name(), *n);
                f.eval(1.3).unwrap()
            })
            .collect();
        for v in &values {
            assert!((v - values[0]).abs() < 1e-9, "{values:?}");
        }
    }

    #[test]
    fn unknown_and_unavailable_methods() {
        let registry = MethodRegistry::default();
        let p = Problem::parse("x", 2.0, 1.0).unwrap();
        let ctx = MethodContext {
            problem: &p,
            ivp: IvpConfig::default(),
            table: None,
        };
        assert!(matches!(
            registry.build("newton", &ctx),
            Err(Error::UnknownMethod { .. })
        ));
        assert!(matches!(
            registry.build("rsm", &ctx),
            Err(Error::MethodUnavailable { .. })
        ));
        assert!(matches!(
            registry.build("closed_form_q0", &ctx),
            Err(Error::MethodUnavailable { .. })
        ));
        assert!(registry.build("direct", &ctx).is_ok());
    }

    #[test]
    fn custom_registration() {
        struct Constant;
        impl CharacteristicFunction for Constant {
            fn name(&self) -> &str {
                "constant"
            }
            fn eval(&self, _: f64) -> Result<f64> {
                Ok(1.0)
            }
        }
        let mut registry = MethodRegistry::empty();
        registry.register("constant", |_| Ok(Box::new(Constant)));
        let p = Problem::parse("0", 2.0, 1.0).unwrap();
        let ctx = MethodContext {
            problem: &p,
            ivp: IvpConfig::default(),
            table: None,
        };
        assert!(registry.contains("constant"));
        assert_eq!(
            registry.build("constant", &ctx).unwrap().eval(3.0).unwrap(),
            1.0
        );
    }
}
