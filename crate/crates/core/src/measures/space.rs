use serde::{Deserialize, Serialize};

use super::atom::{Atom, Point, Tuple};
use super::dn::dn_distance_unchecked;

/// A ground set with a distance function.
pub trait MetricSpace: Send + Sync {
    type Point: Atom;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// Upper bound on all pairwise distances, if one is known.
    fn diameter_bound(&self) -> Option<f64> {
        None
    }

    fn contains(&self, _p: &Self::Point) -> bool {
        true
    }

    /// Coordinate of `p` when the space is a subset of the real line with
    /// the absolute-difference metric. Enables the exact one-dimensional
    /// bounded-Lipschitz solver.
    fn line_coordinate(&self, _p: &Self::Point) -> Option<f64> {
        None
    }
}

impl<S: MetricSpace + ?Sized> MetricSpace for &S {
    type Point = S::Point;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        (**self).dist(a, b)
    }

    fn diameter_bound(&self) -> Option<f64> {
        (**self).diameter_bound()
    }

    fn contains(&self, p: &Self::Point) -> bool {
        (**self).contains(p)
    }

    fn line_coordinate(&self, p: &Self::Point) -> Option<f64> {
        (**self).line_coordinate(p)
    }
}

/// The real line with `|x - y|`; the estimate space `H`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RealLine;

impl MetricSpace for RealLine {
    type Point = f64;

    fn dist(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }

    fn line_coordinate(&self, p: &f64) -> Option<f64> {
        Some(*p)
    }
}

/// The cube `[lo, hi]^dim` with the Euclidean metric, `dim <= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSpace {
    pub lo: f64,
    pub hi: f64,
    pub dim: usize,
}

impl BoxSpace {
    pub fn new(lo: f64, hi: f64, dim: usize) -> Self {
        assert!(lo < hi, "box needs lo < hi");
        assert!((1..=3).contains(&dim), "box dimension must be 1..=3");
        BoxSpace { lo, hi, dim }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        BoxSpace::new(lo, hi, 1)
    }

    pub fn unit(dim: usize) -> Self {
        BoxSpace::new(0.0, 1.0, dim)
    }

    /// Projects a point onto the box componentwise.
    pub fn clip(&self, p: Point) -> Point {
        let c: Vec<f64> = p.coords().iter().map(|x| x.clamp(self.lo, self.hi)).collect();
        Point::new(&c)
    }

    /// The corner with every coordinate at `hi`.
    pub fn upper_corner(&self) -> Point {
        Point::new(&vec![self.hi; self.dim])
    }

    pub fn lower_corner(&self) -> Point {
        Point::new(&vec![self.lo; self.dim])
    }
}

impl MetricSpace for BoxSpace {
    type Point = Point;

    fn dist(&self, a: &Point, b: &Point) -> f64 {
        a.euclidean(b)
    }

    fn diameter_bound(&self) -> Option<f64> {
        Some((self.hi - self.lo) * (self.dim as f64).sqrt())
    }

    fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim && p.coords().iter().all(|x| (self.lo..=self.hi).contains(x))
    }

    fn line_coordinate(&self, p: &Point) -> Option<f64> {
        (self.dim == 1).then(|| p.x())
    }
}

/// Which p-norm of the coordinate distances a product metric uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductNorm {
    Sum,
    Euclidean,
    Max,
}

/// `Z^n` under a p-product metric.
#[derive(Debug, Clone)]
pub struct ProductSpace<S> {
    pub ground: S,
    pub n: usize,
    pub norm: ProductNorm,
}

impl<S: MetricSpace> ProductSpace<S> {
    pub fn new(ground: S, n: usize, norm: ProductNorm) -> Self {
        assert!(n >= 1);
        ProductSpace { ground, n, norm }
    }
}

impl<S: MetricSpace> MetricSpace for ProductSpace<S> {
    type Point = Tuple<S::Point>;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        let d = a.0.iter().zip(&b.0).map(|(x, y)| self.ground.dist(x, y));
        match self.norm {
            ProductNorm::Sum => d.sum(),
            ProductNorm::Euclidean => d.map(|v| v * v).sum::<f64>().sqrt(),
            ProductNorm::Max => d.fold(0.0, f64::max),
        }
    }

    fn diameter_bound(&self) -> Option<f64> {
        let g = self.ground.diameter_bound()?;
        let n = self.n as f64;
        Some(match self.norm {
            ProductNorm::Sum => g * n,
            ProductNorm::Euclidean => g * n.sqrt(),
            ProductNorm::Max => g,
        })
    }

    fn contains(&self, p: &Self::Point) -> bool {
        p.0.len() == self.n && p.0.iter().all(|x| self.ground.contains(x))
    }
}

/// `Z^n` under the contamination metric `d_n`, where two samples are close
/// when all but a small fraction of coordinates are close.
#[derive(Debug, Clone)]
pub struct DnSpace<S> {
    pub ground: S,
    pub n: usize,
}

impl<S: MetricSpace> MetricSpace for DnSpace<S> {
    type Point = Tuple<S::Point>;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        dn_distance_unchecked(&a.0, &b.0, &self.ground)
    }

    fn diameter_bound(&self) -> Option<f64> {
        // the fraction of far coordinates never exceeds 1
        Some(1.0)
    }

    fn contains(&self, p: &Self::Point) -> bool {
        p.0.len() == self.n && p.0.iter().all(|x| self.ground.contains(x))
    }
}

/// `Z^n` with the `d_n` metric over `ground`.
pub fn product_space_dn<S: MetricSpace>(ground: S, n: usize) -> crate::Result<DnSpace<S>> {
    if n == 0 {
        return Err(crate::Error::domain("d_n product space needs n >= 1"));
    }
    Ok(DnSpace { ground, n })
}
