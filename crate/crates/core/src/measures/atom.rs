use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Two support points closer than this are treated as the same atom.
pub const ATOM_TOL: f64 = 1e-12;

/// Maximum dimension of a [`Point`].
pub const MAX_DIM: usize = 3;

/// An element that can be the support point of a [`DiscreteMeasure`].
///
/// `canonical_cmp` is a total order used to sort supports; `same_atom`
/// decides when two points are merged into one atom.
///
/// [`DiscreteMeasure`]: crate::measures::DiscreteMeasure
pub trait Atom: Clone + Send + Sync + fmt::Debug {
    fn canonical_cmp(&self, other: &Self) -> Ordering;
    fn same_atom(&self, other: &Self) -> bool;
}

impl Atom for f64 {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }

    fn same_atom(&self, other: &Self) -> bool {
        (self - other).abs() < ATOM_TOL
    }
}

/// A point of `[lo, hi]^d` with `d <= 3`, stored inline.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct Point {
    dim: u8,
    coords: [f64; MAX_DIM],
}

impl Point {
    /// Builds a point from its coordinates. Panics unless `1 <= len <= 3`.
    pub fn new(coords: &[f64]) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&coords.len()),
            "point dimension must be 1..=3, got {}",
            coords.len()
        );
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Point {
            dim: coords.len() as u8,
            coords: c,
        }
    }

    pub fn scalar(x: f64) -> Self {
        Point {
            dim: 1,
            coords: [x, 0.0, 0.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim()]
    }

    /// First coordinate; the value itself for one-dimensional points.
    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn euclidean(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            write!(f, "{}", self.coords[0])
        } else {
            write!(f, "{:?}", self.coords())
        }
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::scalar(x)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords().to_vec()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = String;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        if (1..=MAX_DIM).contains(&v.len()) {
            Ok(Point::new(&v))
        } else {
            Err(format!("point dimension must be 1..=3, got {}", v.len()))
        }
    }
}

impl Atom for Point {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.dim.cmp(&other.dim).then_with(|| {
            self.coords()
                .iter()
                .zip(other.coords())
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }

    fn same_atom(&self, other: &Self) -> bool {
        self.dim == other.dim && self.euclidean(other) < ATOM_TOL
    }
}

/// An ordered tuple of points, the element type of product spaces.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Tuple<T>(pub Vec<T>);

impl<T: fmt::Debug> fmt::Debug for Tuple<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("").field(&self.0).finish()
    }
}

impl<T: Atom> Atom for Tuple<T> {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| {
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.canonical_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }

    fn same_atom(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.same_atom(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_order_is_lexicographic() {
        let a = Point::new(&[0.0, 1.0]);
        let b = Point::new(&[0.0, 2.0]);
        let c = Point::new(&[1.0, 0.0]);
        assert_eq!(a.canonical_cmp(&b), Ordering::Less);
        assert_eq!(b.canonical_cmp(&c), Ordering::Less);
        assert!(a.same_atom(&Point::new(&[0.0, 1.0 + 1e-14])));
        assert!(!a.same_atom(&Point::new(&[0.0, 1.0 + 1e-9])));
    }

    #[test]
    fn point_serde_as_list() {
        let p = Point::new(&[0.25, 0.5]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[0.25,0.5]");
        let q: Point = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<Point>("[1,2,3,4]").is_err());
    }
}
