use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bl::{bl_distance, union_support, BlCertificate};
use crate::measures::{DiscreteMeasure, MetricSpace};
use crate::{Error, Result};

/// One bounded-Lipschitz instance with its solution, for offline inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpDump<T> {
    pub support: Vec<T>,
    pub distances: Vec<Vec<f64>>,
    pub p_weights: Vec<f64>,
    pub q_weights: Vec<f64>,
    pub value: f64,
    pub certificate: BlCertificate,
}

pub fn lp_dump<S>(p: &DiscreteMeasure<S::Point>, q: &DiscreteMeasure<S::Point>, space: &S) -> Result<LpDump<S::Point>>
where
    S: MetricSpace,
{
    let (value, certificate) = bl_distance(p, q, space)?;
    let (support, p_weights, q_weights) = union_support(p, q);
    let distances = support
        .iter()
        .map(|x| support.iter().map(|y| space.dist(x, y)).collect())
        .collect();
    Ok(LpDump {
        support,
        distances,
        p_weights,
        q_weights,
        value,
        certificate,
    })
}

/// Solves the instance and writes it as pretty JSON to `path`.
pub fn dump_instance<S>(
    p: &DiscreteMeasure<S::Point>,
    q: &DiscreteMeasure<S::Point>,
    space: &S,
    path: &Path,
) -> Result<f64>
where
    S: MetricSpace,
    S::Point: Serialize,
{
    let dump = lp_dump(p, q, space)?;
    let text = serde_json::to_string_pretty(&dump).map_err(|e| Error::domain(e.to_string()))?;
    fs::write(path, text).map_err(|e| Error::domain(format!("{}: {e}", path.display())))?;
    Ok(dump.value)
}
