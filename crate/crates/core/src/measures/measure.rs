use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::atom::{Atom, Tuple, ATOM_TOL};
use super::path::SamplePath;
use crate::{Error, Result};

/// Tolerance on the total mass accepted from callers.
pub const MASS_TOL: f64 = 1e-9;

/// Default bound on marginal support size in [`product_measure`].
pub const PRODUCT_MAX_SUPPORT: usize = 6;
/// Bound on the number of marginals in [`product_measure`].
pub const PRODUCT_MAX_FACTORS: usize = 4;

/// A finitely supported probability measure in canonical form: support
/// sorted by [`Atom::canonical_cmp`], coincident atoms merged, zero-weight
/// atoms dropped and weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Clone", deserialize = "T: Deserialize<'de> + Atom"))]
#[serde(try_from = "RawMeasure<T>", into = "RawMeasure<T>")]
pub struct DiscreteMeasure<T> {
    support: Vec<T>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure<T> {
    support: Vec<T>,
    weights: Vec<f64>,
}

impl<T: Atom> TryFrom<RawMeasure<T>> for DiscreteMeasure<T> {
    type Error = Error;

    fn try_from(raw: RawMeasure<T>) -> Result<Self> {
        DiscreteMeasure::new(raw.support, raw.weights)
    }
}

impl<T> From<DiscreteMeasure<T>> for RawMeasure<T> {
    fn from(m: DiscreteMeasure<T>) -> Self {
        RawMeasure {
            support: m.support,
            weights: m.weights,
        }
    }
}

impl<T: Atom> DiscreteMeasure<T> {
    /// Builds a measure from atoms and weights. Weights must be
    /// nonnegative and sum to one within [`MASS_TOL`].
    pub fn new(support: Vec<T>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::domain(format!(
                "support has {} points but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::domain("a probability measure needs at least one atom"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::domain(format!("invalid weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::domain(format!("weights sum to {total}, not 1")));
        }
        Ok(Self::canonicalize(support, weights))
    }

    /// Builds a measure from nonnegative masses with a positive total,
    /// normalizing them.
    pub fn from_masses(support: Vec<T>, masses: Vec<f64>) -> Result<Self> {
        if support.len() != masses.len() || support.is_empty() {
            return Err(Error::domain("support and masses must be nonempty and of equal length"));
        }
        if masses.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::domain("masses must be finite and nonnegative"));
        }
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(Error::domain("total mass must be positive"));
        }
        Ok(Self::canonicalize(support, masses))
    }

    pub fn dirac(x: T) -> Self {
        DiscreteMeasure {
            support: vec![x],
            weights: vec![1.0],
        }
    }

    /// Uniform weights on the given points (duplicates accumulate).
    pub fn uniform(points: Vec<T>) -> Result<Self> {
        let n = points.len();
        Self::from_masses(points, vec![1.0; n])
    }

    fn canonicalize(support: Vec<T>, weights: Vec<f64>) -> Self {
        let mut pairs: Vec<(T, f64)> = support.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        let mut s: Vec<T> = Vec::with_capacity(pairs.len());
        let mut w: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, wx) in pairs {
            match s.last() {
                Some(last) if last.same_atom(&x) => *w.last_mut().unwrap() += wx,
                _ => {
                    s.push(x);
                    w.push(wx);
                }
            }
        }
        let (s, w): (Vec<T>, Vec<f64>) = s.into_iter().zip(w).filter(|(_, wx)| *wx > 0.0).unzip();
        let total: f64 = w.iter().sum();
        let w = if total != 1.0 {
            w.into_iter().map(|x| x / total).collect()
        } else {
            w
        };
        DiscreteMeasure { support: s, weights: w }
    }

    pub fn support(&self) -> &[T] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, f64)> {
        self.support.iter().zip(self.weights.iter().copied())
    }

    /// Mass of the atom equal to `x`, zero when `x` is not in the support.
    pub fn weight_of(&self, x: &T) -> f64 {
        self.iter().find(|(y, _)| y.same_atom(x)).map_or(0.0, |(_, w)| w)
    }

    /// Pushes the measure forward through `f`.
    pub fn map<U: Atom>(&self, f: impl Fn(&T) -> U) -> DiscreteMeasure<U> {
        DiscreteMeasure::<U>::canonicalize(self.support.iter().map(f).collect(), self.weights.clone())
    }

    /// Structural identity: same atoms (up to [`ATOM_TOL`]) with weights
    /// equal within [`ATOM_TOL`].
    pub fn same_measure(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .iter()
                .zip(other.iter())
                .all(|((x, wx), (y, wy))| x.same_atom(y) && (wx - wy).abs() < ATOM_TOL)
    }
}

impl<T: Atom> Atom for DiscreteMeasure<T> {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.iter()
                .zip(other.iter())
                .map(|((x, wx), (y, wy))| x.canonical_cmp(y).then_with(|| wx.total_cmp(&wy)))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }

    fn same_atom(&self, other: &Self) -> bool {
        self.same_measure(other)
    }
}

/// Empirical measure of a sample path: each distinct value weighted by its
/// multiplicity divided by `n`.
pub fn empirical_measure<T: Atom>(path: &SamplePath<T>) -> Result<DiscreteMeasure<T>> {
    empirical_of(path.values())
}

/// Empirical measure of a slice of values.
pub fn empirical_of<T: Atom>(values: &[T]) -> Result<DiscreteMeasure<T>> {
    if values.is_empty() {
        return Err(Error::domain("empirical measure of an empty path"));
    }
    let n = values.len();
    Ok(DiscreteMeasure::canonicalize(values.to_vec(), vec![1.0 / n as f64; n]))
}

/// Convex combination `sum_i coeffs[i] * measures[i]`.
pub fn mixture<T: Atom>(measures: &[DiscreteMeasure<T>], coeffs: &[f64]) -> Result<DiscreteMeasure<T>> {
    if measures.is_empty() || measures.len() != coeffs.len() {
        return Err(Error::domain("mixture needs equally many measures and coefficients"));
    }
    if coeffs.iter().any(|c| !(*c >= 0.0)) {
        return Err(Error::domain("mixture coefficients must be nonnegative"));
    }
    let total: f64 = coeffs.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::domain(format!("mixture coefficients sum to {total}, not 1")));
    }
    let mut support = Vec::new();
    let mut weights = Vec::new();
    for (m, &c) in measures.iter().zip(coeffs) {
        for (x, w) in m.iter() {
            support.push(x.clone());
            weights.push(c * w);
        }
    }
    Ok(DiscreteMeasure::canonicalize(support, weights))
}

/// Uniform mixture `(1/n) sum_i measures[i]`.
pub fn uniform_mixture<T: Atom>(measures: &[DiscreteMeasure<T>]) -> Result<DiscreteMeasure<T>> {
    let n = measures.len();
    mixture(measures, &vec![1.0 / n as f64; n])
}

/// Independent product of the marginals, supported on tuples. Guarded
/// against blowup: at most [`PRODUCT_MAX_FACTORS`] marginals, each with at
/// most `max_support` atoms.
pub fn product_measure_with_limit<T: Atom>(
    marginals: &[DiscreteMeasure<T>],
    max_support: usize,
) -> Result<DiscreteMeasure<Tuple<T>>> {
    if marginals.is_empty() {
        return Err(Error::domain("product of no marginals"));
    }
    if marginals.len() > PRODUCT_MAX_FACTORS {
        return Err(Error::Capacity {
            what: "product factors",
            actual: marginals.len(),
            limit: PRODUCT_MAX_FACTORS,
        });
    }
    if let Some(m) = marginals.iter().find(|m| m.len() > max_support) {
        return Err(Error::Capacity {
            what: "marginal support size",
            actual: m.len(),
            limit: max_support,
        });
    }
    let mut atoms: Vec<(Vec<T>, f64)> = vec![(Vec::new(), 1.0)];
    for m in marginals {
        atoms = atoms
            .into_iter()
            .flat_map(|(prefix, w)| {
                m.iter().map(move |(x, wx)| {
                    let mut t = prefix.clone();
                    t.push(x.clone());
                    (t, w * wx)
                })
            })
            .collect();
    }
    let (support, weights): (Vec<_>, Vec<_>) = atoms.into_iter().map(|(t, w)| (Tuple(t), w)).unzip();
    Ok(DiscreteMeasure::canonicalize(support, weights))
}

/// [`product_measure_with_limit`] with the default support bound.
pub fn product_measure<T: Atom>(marginals: &[DiscreteMeasure<T>]) -> Result<DiscreteMeasure<Tuple<T>>> {
    product_measure_with_limit(marginals, PRODUCT_MAX_SUPPORT)
}
