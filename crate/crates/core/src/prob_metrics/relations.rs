use serde::{Deserialize, Serialize};

use super::bl::bl_distance;
use super::prohorov::prohorov_distance;
use crate::measures::{DiscreteMeasure, MetricSpace};
use crate::Result;

/// Slack allowed in the inequality checks between the two metrics.
pub const RELATION_TOL: f64 = 1e-6;

/// Above this bounded-Lipschitz value `pi <= sqrt(d_BL)` is only recorded.
pub const SQRT_BOUND_REGIME: f64 = 0.25;

/// Both distances and the outcome of the two comparison inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRelations {
    pub bl: f64,
    pub prohorov: f64,
    pub sqrt_bl: f64,
    /// `pi <= sqrt(d_BL)` within [`RELATION_TOL`].
    pub prohorov_below_sqrt_bl: bool,
    /// `d_BL <= 2 pi` within [`RELATION_TOL`].
    pub bl_below_two_prohorov: bool,
    /// Whether the square-root bound is expected to hold at this size
    /// (`d_BL <= 0.25`); above that it is reported but not required.
    pub sqrt_bound_checked: bool,
}

impl MetricRelations {
    /// False when a required inequality fails.
    pub fn consistent(&self) -> bool {
        self.bl_below_two_prohorov && (!self.sqrt_bound_checked || self.prohorov_below_sqrt_bl)
    }
}

pub fn metric_relations<S: MetricSpace>(
    p: &DiscreteMeasure<S::Point>,
    q: &DiscreteMeasure<S::Point>,
    space: &S,
) -> Result<MetricRelations> {
    let (bl, _) = bl_distance(p, q, space)?;
    let prohorov = prohorov_distance(p, q, space)?;
    let sqrt_bl = bl.sqrt();
    Ok(MetricRelations {
        bl,
        prohorov,
        sqrt_bl,
        prohorov_below_sqrt_bl: prohorov <= sqrt_bl + RELATION_TOL,
        bl_below_two_prohorov: bl <= 2.0 * prohorov + RELATION_TOL,
        sqrt_bound_checked: bl <= SQRT_BOUND_REGIME,
    })
}
