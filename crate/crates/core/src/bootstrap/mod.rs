//! Efron's bootstrap and the circular moving block bootstrap.
//!
//! Indices are 0-based here; the block `B_{I,b}` starting at 1-based
//! position `I` reads positions `I-1, ..., I+b-2` modulo `n`.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimators::Statistic;
use crate::measures::{empirical_of, Atom, DiscreteMeasure, Point, SamplePath};
use crate::rng::{derive, stream, substream};
use crate::{Error, Result};

/// Default block-length exponent.
pub const DEFAULT_BLOCK_EXPONENT: f64 = 0.25;
/// Exponents must stay below this for real-valued data.
pub const MAX_EXPONENT: f64 = 1.0 / 3.0;
/// Upper limit of the extended range used for multivariate data.
pub const MAX_EXTENDED_EXPONENT: f64 = 0.45;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Efron,
    MovingBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapScheme {
    pub kind: SchemeKind,
    #[serde(default = "default_exponent")]
    pub block_exponent: f64,
    /// Resample length for Efron's scheme; the path length when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resample_size: Option<usize>,
    /// Block starts drawn from all `n` positions with wrap-around (default),
    /// or only from the `n - b + 1` positions whose block fits.
    #[serde(default = "yes")]
    pub circular: bool,
    /// Allows exponents up to [`MAX_EXTENDED_EXPONENT`].
    #[serde(default)]
    pub extended_schedule: bool,
}

fn default_exponent() -> f64 {
    DEFAULT_BLOCK_EXPONENT
}

fn yes() -> bool {
    true
}

impl BootstrapScheme {
    pub fn efron() -> Self {
        BootstrapScheme {
            kind: SchemeKind::Efron,
            block_exponent: DEFAULT_BLOCK_EXPONENT,
            resample_size: None,
            circular: true,
            extended_schedule: false,
        }
    }

    pub fn moving_block(block_exponent: f64) -> Self {
        BootstrapScheme {
            kind: SchemeKind::MovingBlock,
            block_exponent,
            ..Self::efron()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == SchemeKind::MovingBlock {
            check_exponent(self.block_exponent, self.extended_schedule)?;
            if self.resample_size.is_some() {
                return Err(Error::domain("moving block resamples always have the path length"));
            }
        }
        if self.resample_size == Some(0) {
            return Err(Error::domain("resample size must be positive"));
        }
        Ok(())
    }

    pub fn schedule(&self, n: usize) -> Result<BlockSchedule> {
        schedule_with_limit(n, self.block_exponent, self.extended_schedule)
    }

    /// Source indices of one resample of a length-`n` path.
    pub fn indices<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<usize>> {
        match self.kind {
            SchemeKind::Efron => Ok(efron_indices(n, self.resample_size.unwrap_or(n), rng)),
            SchemeKind::MovingBlock => Ok(mbb_indices(&self.schedule(n)?, self.circular, rng)),
        }
    }
}

/// Block length `b` and block count `ell` for a path of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSchedule {
    pub n: usize,
    pub b: usize,
    pub ell: usize,
}

fn check_exponent(e: f64, extended: bool) -> Result<()> {
    let limit = if extended { MAX_EXTENDED_EXPONENT } else { MAX_EXPONENT };
    let ok = e > 0.0 && if extended { e <= limit } else { e < limit };
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!("block exponent {e} outside (0, {limit:.4})")))
    }
}

/// `b = max(1, floor(2^(q * exponent)))` with `q = floor(log2 n)`, so `b`
/// is constant on every dyadic range `[2^q, 2^(q+1))`; `ell = ceil(n / b)`.
pub fn block_schedule(n: usize, exponent: f64) -> Result<BlockSchedule> {
    schedule_with_limit(n, exponent, false)
}

/// [`block_schedule`] accepting exponents up to [`MAX_EXTENDED_EXPONENT`].
pub fn block_schedule_extended(n: usize, exponent: f64) -> Result<BlockSchedule> {
    schedule_with_limit(n, exponent, true)
}

fn schedule_with_limit(n: usize, exponent: f64, extended: bool) -> Result<BlockSchedule> {
    if n == 0 {
        return Err(Error::domain("block schedule needs n >= 1"));
    }
    check_exponent(exponent, extended)?;
    let q = n.ilog2() as f64;
    let b = ((q * exponent).exp2() + 1e-9).floor().max(1.0) as usize;
    let b = b.min(n);
    Ok(BlockSchedule { n, b, ell: n.div_ceil(b) })
}

fn efron_indices<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Vec<usize> {
    (0..m).map(|_| rng.random_range(0..n)).collect()
}

fn mbb_indices<R: Rng + ?Sized>(s: &BlockSchedule, circular: bool, rng: &mut R) -> Vec<usize> {
    let starts = if circular { s.n } else { s.n - s.b + 1 };
    let mut out = Vec::with_capacity(s.ell * s.b);
    for _ in 0..s.ell {
        let start = rng.random_range(0..starts);
        out.extend((0..s.b).map(|j| (start + j) % s.n));
    }
    out.truncate(s.n);
    out
}

/// Efron resample of size `m`.
pub fn efron_resample<T: Clone>(path: &SamplePath<T>, m: usize, seed: u64) -> Result<SamplePath<T>> {
    if m == 0 {
        return Err(Error::domain("resample size must be positive"));
    }
    let mut rng = substream(seed, stream::BOOTSTRAP);
    let idx = efron_indices(path.len(), m, &mut rng);
    gather(path, &idx, seed)
}

/// Moving block resample with wrap-around; the output has length `n`.
pub fn mbb_resample<T: Clone>(path: &SamplePath<T>, schedule: &BlockSchedule, seed: u64) -> Result<SamplePath<T>> {
    mbb_resample_with(path, schedule, true, seed)
}

pub fn mbb_resample_with<T: Clone>(
    path: &SamplePath<T>,
    schedule: &BlockSchedule,
    circular: bool,
    seed: u64,
) -> Result<SamplePath<T>> {
    if schedule.n != path.len() {
        return Err(Error::domain(format!(
            "schedule is for n = {} but the path has {} values",
            schedule.n,
            path.len()
        )));
    }
    let mut rng = substream(seed, stream::BOOTSTRAP);
    let idx = mbb_indices(schedule, circular, &mut rng);
    gather(path, &idx, seed)
}

/// Resample according to `scheme`.
pub fn resample<T: Clone>(path: &SamplePath<T>, scheme: &BootstrapScheme, seed: u64) -> Result<SamplePath<T>> {
    let idx = resample_indices(path.len(), scheme, seed)?;
    gather(path, &idx, seed)
}

/// Source indices of the resample [`resample`] would produce.
pub fn resample_indices(n: usize, scheme: &BootstrapScheme, seed: u64) -> Result<Vec<usize>> {
    scheme.validate()?;
    let mut rng = substream(seed, stream::BOOTSTRAP);
    scheme.indices(n, &mut rng)
}

fn gather<T: Clone>(path: &SamplePath<T>, idx: &[usize], seed: u64) -> Result<SamplePath<T>> {
    let v = path.values();
    path.with_values(idx.iter().map(|&i| v[i].clone()).collect(), format!("{}*", path.origin()), seed)
}

/// Writes `rep,position,source_index` rows (with header when `header`).
pub fn write_index_trace<W: Write>(mut w: W, rep: usize, indices: &[usize], header: bool) -> std::io::Result<()> {
    if header {
        writeln!(w, "rep,position,source_index")?;
    }
    for (pos, i) in indices.iter().enumerate() {
        writeln!(w, "{rep},{pos},{i}")?;
    }
    Ok(())
}

/// Law of the estimator over `inner_reps` resamples of `path`: the
/// empirical measure of `S(empirical(resample_r))`, `r = 0..inner_reps`.
/// Resample `r` uses seed `derive(seed, r)`.
pub fn bootstrap_law_of_estimator(
    path: &SamplePath<Point>,
    scheme: &BootstrapScheme,
    estimator: &dyn Statistic,
    inner_reps: usize,
    seed: u64,
) -> Result<DiscreteMeasure<f64>> {
    if inner_reps == 0 {
        return Err(Error::domain("inner_reps must be at least 1"));
    }
    scheme.validate()?;
    let n = path.len();
    let values = path.values();
    let estimates: Vec<f64> = (0..inner_reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(derive(seed, r as u64), stream::BOOTSTRAP);
            let idx = scheme.indices(n, &mut rng)?;
            let sample: Vec<Point> = idx.iter().map(|&i| values[i]).collect();
            let emp = empirical_of(&sample)?;
            estimator.evaluate(&emp).map_err(|e| Error::Resample {
                index: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    if let Some(bad) = estimates.iter().position(|v| !v.is_finite()) {
        return Err(Error::Resample {
            index: bad,
            source: Box::new(Error::Numeric {
                message: "estimator returned a non-finite value".into(),
                iterations: 0,
            }),
        });
    }
    DiscreteMeasure::uniform(estimates)
}

/// True when every value of `resampled` occurs in `original`.
pub fn values_from<T: Atom>(resampled: &[T], original: &[T]) -> bool {
    resampled.iter().all(|x| original.iter().any(|y| y.same_atom(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::EstimatorOperator;

    fn path(values: &[f64]) -> SamplePath<f64> {
        SamplePath::new(values.to_vec(), "test", 0).unwrap()
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(block_schedule(1, 0.25).unwrap(), BlockSchedule { n: 1, b: 1, ell: 1 });
        assert_eq!(block_schedule(16, 0.25).unwrap(), BlockSchedule { n: 16, b: 2, ell: 8 });
        assert_eq!(block_schedule(100, 0.25).unwrap().b, block_schedule(127, 0.25).unwrap().b);
        assert!(block_schedule(10, 0.0).is_err());
        assert!(block_schedule(10, 1.0 / 3.0).is_err());
        assert!(block_schedule_extended(10, 0.45).is_ok());
        assert!(block_schedule_extended(10, 0.5).is_err());
    }

    #[test]
    fn efron_single_observation() {
        let p = path(&[0.7]);
        let r = efron_resample(&p, 5, 3).unwrap();
        assert_eq!(r.values(), &[0.7; 5]);
    }

    #[test]
    fn efron_frequency_of_ones() {
        let p = path(&[0.0, 1.0]);
        let r = efron_resample(&p, 10_000, 12).unwrap();
        let f = r.values().iter().filter(|v| **v == 1.0).count() as f64 / 10_000.0;
        // 3 sigma = 3 * 0.5 / 100
        assert!((f - 0.5).abs() < 0.015, "{f}");
        assert_eq!(r, efron_resample(&p, 10_000, 12).unwrap());
    }

    #[test]
    fn single_block_is_a_rotation() {
        let v: Vec<f64> = (0..8).map(f64::from).collect();
        let p = path(&v);
        let s = BlockSchedule { n: 8, b: 8, ell: 1 };
        let r = mbb_resample(&p, &s, 4).unwrap();
        let start = r.values()[0] as usize;
        for (j, x) in r.values().iter().enumerate() {
            assert_eq!(*x as usize, (start + j) % 8);
        }
    }

    #[test]
    fn constant_path_stays_constant() {
        let p = path(&[0.3; 20]);
        let s = block_schedule(20, 0.25).unwrap();
        assert!(mbb_resample(&p, &s, 1).unwrap().values().iter().all(|v| *v == 0.3));
    }

    #[test]
    fn schedule_mismatch() {
        let p = path(&[0.0, 1.0, 2.0]);
        assert!(mbb_resample(&p, &block_schedule(4, 0.25).unwrap(), 0).is_err());
    }

    #[test]
    fn non_circular_starts_keep_blocks_inside() {
        let s = BlockSchedule { n: 10, b: 4, ell: 3 };
        let mut rng = substream(5, stream::BOOTSTRAP);
        for _ in 0..200 {
            let idx = mbb_indices(&s, false, &mut rng);
            assert_eq!(idx.len(), 10);
            for block in idx.chunks(4) {
                assert!(block.windows(2).all(|w| w[1] == w[0] + 1));
            }
        }
    }

    #[test]
    fn law_of_constant_path_is_a_dirac() {
        let p = SamplePath::new(vec![Point::scalar(0.4); 30], "c", 0).unwrap();
        for scheme in [BootstrapScheme::efron(), BootstrapScheme::moving_block(0.25)] {
            let law = bootstrap_law_of_estimator(&p, &scheme, &EstimatorOperator::Median, 50, 2).unwrap();
            assert_eq!(law.support(), &[0.4]);
        }
    }

    #[test]
    fn trace_csv_format() {
        let mut buf = Vec::new();
        write_index_trace(&mut buf, 2, &[4, 0], true).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "rep,position,source_index\n2,0,4\n2,1,0\n");
    }
}
