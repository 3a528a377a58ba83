use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::operator::{EstimatorOperator, Statistic};
use crate::{Error, Result};

/// Estimator request as written in a config file: a registry key plus the
/// optional parameters of the built-ins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub name: String,
    /// Trim fraction of `trimmed_mean` (default 0.1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Clipping constant of `huber`; required for it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

impl EstimatorSpec {
    pub fn named(name: &str) -> Self {
        EstimatorSpec {
            name: name.to_string(),
            beta: None,
            k: None,
        }
    }
}

type Factory = Arc<dyn Fn(&EstimatorSpec) -> Result<Arc<dyn Statistic>> + Send + Sync>;

/// Name-addressable estimators. The built-ins are always present; external
/// operators are added with [`EstimatorRegistry::register`].
#[derive(Clone)]
pub struct EstimatorRegistry {
    factories: BTreeMap<String, Factory>,
}

impl std::fmt::Debug for EstimatorRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

impl Default for EstimatorRegistry {
    fn default() -> Self {
        let mut r = EstimatorRegistry {
            factories: BTreeMap::new(),
        };
        r.register("mean", |_| Ok(Arc::new(EstimatorOperator::Mean)));
        r.register("median", |_| Ok(Arc::new(EstimatorOperator::Median)));
        r.register("trimmed_mean", |s| {
            let op = EstimatorOperator::TrimmedMean {
                beta: s.beta.unwrap_or(0.1),
            };
            op.validate()?;
            Ok(Arc::new(op))
        });
        r.register("huber", |s| {
            let k = s
                .k
                .ok_or_else(|| Error::domain("huber needs the clipping constant k"))?;
            let op = EstimatorOperator::Huber { k };
            op.validate()?;
            Ok(Arc::new(op))
        });
        r
    }
}

impl EstimatorRegistry {
    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&EstimatorSpec) -> Result<Arc<dyn Statistic>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Arc::new(factory));
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn build(&self, spec: &EstimatorSpec) -> Result<Arc<dyn Statistic>> {
        let f = self.factories.get(&spec.name).ok_or_else(|| {
            Error::domain(format!(
                "unknown estimator '{}'; registered: {}",
                spec.name,
                self.names().join(", ")
            ))
        })?;
        f(spec)
    }
}
