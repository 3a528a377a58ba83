use std::fmt;

use serde::{Deserialize, Serialize};

use crate::measures::{DiscreteMeasure, Point};
use crate::{Error, Result};

/// Relative bisection tolerance for the Huber root.
pub const HUBER_TOL: f64 = 1e-10;

const FLAT_TOL: f64 = 1e-12;

/// A statistical operator `S: M(Z) -> R`, evaluated on discrete measures so
/// that `S_n(z_1, ..., z_n) = S(empirical measure)`.
pub trait Statistic: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn evaluate(&self, measure: &DiscreteMeasure<Point>) -> Result<f64>;
}

/// The built-in operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum EstimatorOperator {
    Mean,
    /// Midpoint of the flat spot when the distribution function equals 1/2
    /// on an interval.
    Median,
    /// `(1 / (1 - 2 beta)) int_beta^{1 - beta} F^{-1}(u) du`.
    TrimmedMean { beta: f64 },
    /// Root of `sum_i w_i psi_k(z_i - theta)` with `psi_k` clipping at `k`.
    Huber { k: f64 },
}

impl EstimatorOperator {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EstimatorOperator::TrimmedMean { beta } if !(0.0..0.5).contains(&beta) => {
                Err(Error::domain(format!("trim fraction {beta} not in [0, 0.5)")))
            }
            EstimatorOperator::Huber { k } if !(k > 0.0) || !k.is_finite() => {
                Err(Error::domain(format!("Huber constant {k} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

impl Statistic for EstimatorOperator {
    fn name(&self) -> &str {
        match self {
            EstimatorOperator::Mean => "mean",
            EstimatorOperator::Median => "median",
            EstimatorOperator::TrimmedMean { .. } => "trimmed_mean",
            EstimatorOperator::Huber { .. } => "huber",
        }
    }

    fn evaluate(&self, measure: &DiscreteMeasure<Point>) -> Result<f64> {
        self.validate()?;
        let (xs, ws) = one_dimensional(measure, self.name())?;
        Ok(match *self {
            EstimatorOperator::Mean => xs.iter().zip(&ws).map(|(x, w)| x * w).sum(),
            EstimatorOperator::Median => median(&xs, &ws),
            EstimatorOperator::TrimmedMean { beta } => trimmed_mean(&xs, &ws, beta),
            EstimatorOperator::Huber { k } => huber(&xs, &ws, k)?,
        })
    }
}

/// Coordinates and weights of a measure on the line, sorted ascending.
fn one_dimensional(m: &DiscreteMeasure<Point>, what: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    if m.support().iter().any(|p| p.dim() != 1) {
        return Err(Error::capability(format!("{what} is implemented for one-dimensional data only")));
    }
    // canonical order of one-dimensional points is ascending
    Ok((m.support().iter().map(|p| p.x()).collect(), m.weights().to_vec()))
}

fn median(xs: &[f64], ws: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..xs.len() {
        acc += ws[k];
        if (acc - 0.5).abs() <= FLAT_TOL && k + 1 < xs.len() {
            return 0.5 * (xs[k] + xs[k + 1]);
        }
        if acc > 0.5 {
            return xs[k];
        }
    }
    xs[xs.len() - 1]
}

fn trimmed_mean(xs: &[f64], ws: &[f64], beta: f64) -> f64 {
    let (lo, hi) = (beta, 1.0 - beta);
    let mut acc = 0.0;
    let mut integral = 0.0;
    for (x, w) in xs.iter().zip(ws) {
        let (a, b) = (acc, acc + w);
        let overlap = (b.min(hi) - a.max(lo)).max(0.0);
        integral += overlap * x;
        acc = b;
    }
    integral / (hi - lo)
}

fn huber(xs: &[f64], ws: &[f64], k: f64) -> Result<f64> {
    let score = |t: f64| -> f64 { xs.iter().zip(ws).map(|(x, w)| w * (x - t).clamp(-k, k)).sum() };
    let (a, b) = (xs[0], xs[xs.len() - 1]);
    if a == b {
        return Ok(a);
    }
    if score(a) < 0.0 || score(b) > 0.0 {
        return Err(Error::Numeric {
            message: "Huber score has no sign change on the support hull".into(),
            iterations: 0,
        });
    }
    let tol = HUBER_TOL * (b - a).max(1.0);
    // The score is nonincreasing, so its zero set is an interval; find both
    // ends and return the midpoint.
    let bisect = |strict: bool| -> f64 {
        let (mut lo, mut hi) = (a, b);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let s = score(mid);
            if (strict && s < 0.0) || (!strict && s <= 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(0.5 * (bisect(false) + bisect(true)))
}

/// `sum_i w_i psi_k(z_i - theta)`; zero at the Huber estimate.
pub fn huber_score(measure: &DiscreteMeasure<Point>, k: f64, theta: f64) -> f64 {
    measure.iter().map(|(p, w)| w * (p.x() - theta).clamp(-k, k)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64], weights: &[f64]) -> DiscreteMeasure<Point> {
        DiscreteMeasure::new(points.iter().map(|&x| Point::scalar(x)).collect(), weights.to_vec()).unwrap()
    }

    #[test]
    fn mean_of_dirac() {
        let m = DiscreteMeasure::dirac(Point::scalar(0.37));
        assert_eq!(EstimatorOperator::Mean.evaluate(&m).unwrap(), 0.37);
    }

    #[test]
    fn median_midpoint_rule() {
        let m = line(&[0.0, 1.0], &[0.5, 0.5]);
        assert_eq!(EstimatorOperator::Median.evaluate(&m).unwrap(), 0.5);
        let m = line(&[0.0, 0.2, 1.0], &[0.2, 0.5, 0.3]);
        assert_eq!(EstimatorOperator::Median.evaluate(&m).unwrap(), 0.2);
    }

    #[test]
    fn huber_example_matches_grid_scan() {
        let m = line(&[0.0, 0.9], &[2.0 / 3.0, 1.0 / 3.0]);
        let k = 0.5;
        let theta = EstimatorOperator::Huber { k }.evaluate(&m).unwrap();
        // grid scan for the sign change of the score
        let mut prev = huber_score(&m, k, 0.0);
        let mut root = f64::NAN;
        let steps = 900_000;
        for s in 1..=steps {
            let t = 0.9 * s as f64 / steps as f64;
            let cur = huber_score(&m, k, t);
            if prev > 0.0 && cur <= 0.0 {
                root = t;
                break;
            }
            prev = cur;
        }
        assert!((theta - root).abs() < 1e-6, "{theta} vs {root}");
        assert!((theta - 0.25).abs() < 1e-9);
        assert!(huber_score(&m, k, theta).abs() < 1e-9);
    }

    #[test]
    fn huber_flat_zero_set_returns_midpoint() {
        // With k small the score vanishes on the whole gap between atoms.
        let m = line(&[0.0, 1.0], &[0.5, 0.5]);
        let theta = EstimatorOperator::Huber { k: 0.1 }.evaluate(&m).unwrap();
        assert!((theta - 0.5).abs() < 1e-9);
    }

    #[test]
    fn trimmed_mean_splits_boundary_atoms() {
        let m = line(&[0.0, 1.0, 10.0], &[0.25, 0.5, 0.25]);
        let t = EstimatorOperator::TrimmedMean { beta: 0.25 }.evaluate(&m).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        let t = EstimatorOperator::TrimmedMean { beta: 0.1 }.evaluate(&m).unwrap();
        // (0.15 * 0 + 0.5 * 1 + 0.15 * 10) / 0.8
        assert!((t - 2.0 / 0.8).abs() < 1e-12);
        let t0 = EstimatorOperator::TrimmedMean { beta: 0.0 }.evaluate(&m).unwrap();
        let mean = EstimatorOperator::Mean.evaluate(&m).unwrap();
        assert!((t0 - mean).abs() < 1e-12);
    }

    #[test]
    fn multidimensional_is_a_capability_error() {
        let m = DiscreteMeasure::dirac(Point::new(&[0.1, 0.2]));
        assert!(matches!(EstimatorOperator::Median.evaluate(&m), Err(Error::Capability(_))));
    }

    #[test]
    fn invalid_parameters() {
        let m = line(&[0.0], &[1.0]);
        assert!(EstimatorOperator::TrimmedMean { beta: 0.5 }.evaluate(&m).is_err());
        assert!(EstimatorOperator::Huber { k: 0.0 }.evaluate(&m).is_err());
    }
}
