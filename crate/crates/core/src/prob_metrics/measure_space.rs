use super::bl::{bl_distance_with, BlOptions};
use crate::measures::{DiscreteMeasure, MetricSpace};

/// Discrete probability measures over `inner` with the bounded-Lipschitz
/// distance; stacking it gives laws of laws.
///
/// A failed inner solve yields `NaN`, which the outer solver rejects.
#[derive(Debug, Clone)]
pub struct MeasureSpace<S> {
    pub inner: S,
    pub options: BlOptions,
}

pub fn measure_space<S: MetricSpace>(inner: S) -> MeasureSpace<S> {
    MeasureSpace {
        inner,
        options: BlOptions::default(),
    }
}

impl<S: MetricSpace> MetricSpace for MeasureSpace<S> {
    type Point = DiscreteMeasure<S::Point>;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        bl_distance_with(a, b, &self.inner, &self.options).map_or(f64::NAN, |(d, _)| d)
    }

    fn diameter_bound(&self) -> Option<f64> {
        Some(2.0)
    }

    fn contains(&self, p: &Self::Point) -> bool {
        p.support().iter().all(|x| self.inner.contains(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::RealLine;
    use crate::prob_metrics::bl_distance;

    #[test]
    fn singletons_reduce_to_inner() {
        let h = measure_space(RealLine);
        let a = DiscreteMeasure::dirac(0.0);
        let b = DiscreteMeasure::dirac(1.0);
        assert_eq!(h.dist(&a, &a), 0.0);
        let outer_a = DiscreteMeasure::dirac(a.clone());
        let outer_b = DiscreteMeasure::dirac(b.clone());
        let (d, _) = bl_distance(&outer_a, &outer_b, &h).unwrap();
        // outer diracs at inner distance 2/3
        let t = 2.0 / 3.0;
        assert!((d - 2.0 * t / (2.0 + t)).abs() < 1e-9);
    }
}
