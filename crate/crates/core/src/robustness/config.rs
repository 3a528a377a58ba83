use serde::{Deserialize, Serialize};

use crate::bootstrap::BootstrapScheme;
use crate::estimators::EstimatorSpec;
use crate::processes::{same_class, ContaminationSpec, ProcessSpec};
use crate::robustness::distance::MAX_OUTER_ATOMS;
use crate::{Error, Result};

pub const DEFAULT_OUTER_REPS: usize = 32;
pub const DEFAULT_INNER_REPS: usize = 500;

/// Which output distances an experiment computes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NestedBl,
    CoupledExpectation,
    #[default]
    Both,
}

impl Method {
    pub fn nested(self) -> bool {
        matches!(self, Method::NestedBl | Method::Both)
    }

    pub fn coupled(self) -> bool {
        matches!(self, Method::CoupledExpectation | Method::Both)
    }
}

/// One robustness experiment: two process arms, a bootstrap scheme and an
/// estimator, evaluated for every `n` in `n_grid`.
///
/// The second arm is `process_q` when given, otherwise `process_p`; a
/// `contamination_q` is then applied on top of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_grid: Vec<usize>,
    #[serde(default = "default_outer")]
    pub outer_reps: usize,
    #[serde(default = "default_inner")]
    pub inner_reps: usize,
    #[serde(default)]
    pub method: Method,
    pub estimator: EstimatorSpec,
    pub scheme: BootstrapScheme,
    pub process_p: ProcessSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process_q: Option<ProcessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contamination_q: Option<ContaminationSpec>,
}

fn default_outer() -> usize {
    DEFAULT_OUTER_REPS
}

fn default_inner() -> usize {
    DEFAULT_INNER_REPS
}

impl ExperimentConfig {
    pub fn new(process_p: ProcessSpec, scheme: BootstrapScheme, estimator: EstimatorSpec, n_grid: Vec<usize>, seed: u64) -> Self {
        ExperimentConfig {
            seed,
            n_grid,
            outer_reps: DEFAULT_OUTER_REPS,
            inner_reps: DEFAULT_INNER_REPS,
            method: Method::Both,
            estimator,
            scheme,
            process_p,
            process_q: None,
            contamination_q: None,
        }
    }

    /// The resolved second arm.
    pub fn arm_q(&self) -> ProcessSpec {
        let mut q = self.process_q.clone().unwrap_or_else(|| self.process_p.clone());
        if let Some(c) = &self.contamination_q {
            q.contamination = Some(c.clone());
        }
        q
    }

    pub fn validate(&self) -> Result<()> {
        if self.outer_reps < 2 || self.inner_reps < 2 {
            return Err(Error::domain("outer_reps and inner_reps must both be at least 2"));
        }
        if self.method.nested() && self.outer_reps > MAX_OUTER_ATOMS {
            return Err(Error::Capacity {
                what: "outer replicates of a nested distance",
                actual: self.outer_reps,
                limit: MAX_OUTER_ATOMS,
            });
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("n_grid must be a nonempty strictly ascending list of positive sizes"));
        }
        self.scheme.validate()?;
        self.process_p.validate()?;
        let q = self.arm_q();
        q.validate()?;
        if !same_class(&self.process_p, &q) {
            return Err(Error::domain(format!(
                "arms differ in structural class or ground: {:?} on {:?} vs {:?} on {:?}",
                self.process_p.structural_class(),
                self.process_p.ground,
                q.structural_class(),
                q.ground
            )));
        }
        Ok(())
    }
}
