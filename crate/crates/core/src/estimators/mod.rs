//! Estimators given as statistical operators on discrete measures.

mod operator;
mod probe;
mod registry;

pub use operator::{huber_score, EstimatorOperator, Statistic, HUBER_TOL};
pub use probe::{modulus_probe, ModulusRow};
pub use registry::{EstimatorRegistry, EstimatorSpec};
