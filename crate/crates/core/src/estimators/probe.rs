use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operator::Statistic;
use crate::measures::{mixture, BoxSpace, DiscreteMeasure, Point};
use crate::prob_metrics::bl_distance;
use crate::rng::{derive, stream, substream};
use crate::Result;

/// Empirical modulus of continuity at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusRow {
    pub radius: f64,
    /// `max |S(Q) - S(center)|` over accepted probes.
    pub modulus: f64,
    /// Probes with `d_BL(Q, center) <= radius`.
    pub accepted: usize,
}

/// Random perturbation of `center` of size about `scale`: atoms possibly
/// jittered by up to `scale`, then a random share of mass moved to a
/// uniformly drawn point.
fn perturb<R: Rng>(center: &DiscreteMeasure<Point>, g: &BoxSpace, scale: f64, rng: &mut R) -> Result<DiscreteMeasure<Point>> {
    let moved = if rng.random_bool(0.5) {
        let points = center
            .support()
            .iter()
            .map(|p| {
                let c: Vec<f64> = p
                    .coords()
                    .iter()
                    .map(|x| (x + rng.random_range(-scale..=scale)).clamp(g.lo, g.hi))
                    .collect();
                Point::new(&c)
            })
            .collect();
        DiscreteMeasure::from_masses(points, center.weights().to_vec())?
    } else {
        center.clone()
    };
    let t = scale * rng.random::<f64>();
    let target = crate::processes::uniform_draw(g, rng);
    mixture(&[moved, DiscreteMeasure::dirac(target)], &[1.0 - t, t])
}

/// For every radius, the largest change of the estimate among random
/// perturbations `Q` with `d_BL(Q, center) <= radius`. A lower bound on
/// the modulus of continuity of `S` at `center`; perturbation points are
/// drawn from the support hull of `center` widened by the largest radius.
pub fn modulus_probe(
    op: &dyn Statistic,
    center: &DiscreteMeasure<Point>,
    radius_grid: &[f64],
    probes: usize,
    seed: u64,
) -> Result<Vec<ModulusRow>> {
    let s0 = op.evaluate(center)?;
    let rmax = radius_grid.iter().copied().fold(0.0, f64::max);
    let xs: Vec<f64> = center.support().iter().flat_map(|p| p.coords().to_vec()).collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min) - rmax;
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + rmax;
    let dim = center.support()[0].dim();
    let g = if hi > lo { BoxSpace::new(lo, hi, dim) } else { BoxSpace::new(lo, lo + 1.0, dim) };

    radius_grid
        .iter()
        .enumerate()
        .map(|(ri, &r)| {
            if r <= 0.0 {
                return Ok(ModulusRow {
                    radius: r,
                    modulus: 0.0,
                    accepted: 0,
                });
            }
            let found: Vec<Option<f64>> = (0..probes)
                .into_par_iter()
                .map(|k| {
                    let mut rng = substream(derive(derive(seed, ri as u64), k as u64), stream::PROBE);
                    let q = perturb(center, &g, r, &mut rng)?;
                    let (d, _) = bl_distance(&q, center, &g)?;
                    if d <= r {
                        Ok(Some((op.evaluate(&q)? - s0).abs()))
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<_>>()?;
            let accepted: Vec<f64> = found.into_iter().flatten().collect();
            Ok(ModulusRow {
                radius: r,
                modulus: accepted.iter().copied().fold(0.0, f64::max),
                accepted: accepted.len(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::EstimatorOperator;

    #[test]
    fn radius_zero_has_zero_modulus() {
        let c = DiscreteMeasure::uniform(vec![Point::scalar(0.2), Point::scalar(0.7)]).unwrap();
        let rows = modulus_probe(&EstimatorOperator::Mean, &c, &[0.0, 0.1], 50, 1).unwrap();
        assert_eq!(rows[0].modulus, 0.0);
        assert!(rows[1].accepted > 0);
    }

    #[test]
    fn median_jumps_at_a_gap() {
        let c = DiscreteMeasure::uniform(vec![Point::scalar(0.0), Point::scalar(1.0)]).unwrap();
        let rows = modulus_probe(&EstimatorOperator::Median, &c, &[0.01], 200, 3).unwrap();
        assert!(rows[0].modulus >= 0.4, "{rows:?}");
    }
}
