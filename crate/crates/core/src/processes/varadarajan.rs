use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::generate;
use super::spec::ProcessSpec;
use crate::measures::{empirical_measure, DiscreteMeasure, Point};
use crate::prob_metrics::bl_distance;
use crate::rng::derive;
use crate::Result;

/// Bounded-Lipschitz distances between empirical measures and the target
/// law at one path length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: usize,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub distances: Vec<f64>,
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// For each `n`, the distances `d_BL(empirical(path), target)` over `reps`
/// independent paths. Rep `r` at length `n` uses seed
/// `derive(derive(seed, n), r)`.
pub fn varadarajan_diagnostic(
    spec: &ProcessSpec,
    target: &DiscreteMeasure<Point>,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<DecayRow>> {
    spec.validate()?;
    n_grid
        .iter()
        .map(|&n| {
            let base = derive(seed, n as u64);
            let distances: Vec<f64> = (0..reps)
                .into_par_iter()
                .map(|r| {
                    let path = generate(spec, n, derive(base, r as u64))?;
                    let emp = empirical_measure(&path)?;
                    Ok(bl_distance(&emp, target, &spec.ground)?.0)
                })
                .collect::<Result<_>>()?;
            Ok(DecayRow {
                n,
                median: median(&distances),
                min: distances.iter().copied().fold(f64::INFINITY, f64::min),
                max: distances.iter().copied().fold(0.0, f64::max),
                distances,
            })
        })
        .collect()
}
