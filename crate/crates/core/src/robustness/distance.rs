use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::law::LawOfLaws;
use crate::measures::{Atom, DiscreteMeasure, RealLine};
use crate::prob_metrics::{bl_distance, bl_from_matrix, union_support};
use crate::rng::{derive, stream, substream};
use crate::{Error, Result};

/// Cap on the number of outer atoms per arm in a nested distance.
pub const MAX_OUTER_ATOMS: usize = 64;
/// Outer-replicate resamples behind each error bar.
pub const MC_RESAMPLES: usize = 30;
/// Error bars are this multiple of the resampling standard deviation.
pub const MC_Z: f64 = 1.96;

type Law = DiscreteMeasure<f64>;

fn inner_distance(a: &Law, b: &Law) -> Result<f64> {
    bl_distance(a, b, &RealLine).map(|(d, _)| d)
}

fn check_outer(m: &DiscreteMeasure<Law>) -> Result<()> {
    if m.len() > MAX_OUTER_ATOMS {
        return Err(Error::Capacity {
            what: "outer atoms in a nested distance",
            actual: m.len(),
            limit: MAX_OUTER_ATOMS,
        });
    }
    Ok(())
}

/// Symmetric matrix of inner distances, computed in parallel.
fn distance_matrix(points: &[Law]) -> Result<Vec<Vec<f64>>> {
    let k = points.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| inner_distance(&points[i], &points[j]))
        .collect::<Result<_>>()?;
    let mut d = vec![vec![0.0; k]; k];
    for (&(i, j), v) in pairs.iter().zip(values) {
        d[i][j] = v;
        d[j][i] = v;
    }
    Ok(d)
}

/// Bounded-Lipschitz distance between two laws of laws whose ground metric
/// is the inner bounded-Lipschitz distance on the line.
pub fn nested_bl_distance(lp: &DiscreteMeasure<Law>, lq: &DiscreteMeasure<Law>) -> Result<f64> {
    check_outer(lp)?;
    check_outer(lq)?;
    let (points, wp, wq) = union_support(lp, lq);
    let c: Vec<f64> = wp.iter().zip(&wq).map(|(a, b)| a - b).collect();
    if c.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let d = distance_matrix(&points)?;
    Ok(bl_from_matrix(&c, &d)?.0)
}

/// `(1/K) sum_k d_BL(inner_P^k, inner_Q^k)` over replicates paired by index.
pub fn coupled_expectation(lp: &LawOfLaws, lq: &LawOfLaws) -> Result<f64> {
    if lp.replicates.len() != lq.replicates.len() {
        return Err(Error::domain("coupled arms need equally many replicates"));
    }
    let d: Vec<f64> = lp
        .replicates
        .par_iter()
        .zip(&lq.replicates)
        .map(|(a, b)| inner_distance(a, b))
        .collect::<Result<_>>()?;
    Ok(d.iter().sum::<f64>() / d.len() as f64)
}

/// Output distances of one experiment cell with their error bars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedEstimate {
    pub nested: Option<f64>,
    pub coupled: Option<f64>,
    pub err_nested: Option<f64>,
    pub err_coupled: Option<f64>,
}

/// Inner distances among all replicates of both arms, shared by the point
/// estimates and the resampled error bars.
struct Pairing {
    dist: Vec<Vec<f64>>,
    idx_p: Vec<usize>,
    idx_q: Vec<usize>,
}

impl Pairing {
    fn new(lp: &LawOfLaws, lq: &LawOfLaws) -> Result<Self> {
        let (points, _, _) = union_support(&lp.measure, &lq.measure);
        let locate = |m: &Law| points.iter().position(|x| x.same_atom(m)).expect("replicate is in the union");
        let idx_p = lp.replicates.iter().map(locate).collect();
        let idx_q = lq.replicates.iter().map(locate).collect();
        Ok(Pairing {
            dist: distance_matrix(&points)?,
            idx_p,
            idx_q,
        })
    }

    /// Nested and coupled values for the replicate multiset `picks`.
    fn evaluate(&self, picks: &[usize], nested: bool) -> Result<(f64, f64)> {
        let share = 1.0 / picks.len() as f64;
        let coupled = picks.iter().map(|&k| self.dist[self.idx_p[k]][self.idx_q[k]]).sum::<f64>() * share;
        if !nested {
            return Ok((f64::NAN, coupled));
        }
        let k = self.dist.len();
        let mut c = vec![0.0; k];
        let mut used = vec![false; k];
        for &r in picks {
            c[self.idx_p[r]] += share;
            c[self.idx_q[r]] -= share;
            used[self.idx_p[r]] = true;
            used[self.idx_q[r]] = true;
        }
        let active: Vec<usize> = (0..k).filter(|&i| used[i]).collect();
        let sub_c: Vec<f64> = active.iter().map(|&i| c[i]).collect();
        if sub_c.iter().all(|v| v.abs() < 1e-15) {
            return Ok((0.0, coupled));
        }
        let sub_d: Vec<Vec<f64>> = active
            .iter()
            .map(|&i| active.iter().map(|&j| self.dist[i][j]).collect())
            .collect();
        Ok((bl_from_matrix(&sub_c, &sub_d)?.0, coupled))
    }
}

fn half_width(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    MC_Z * var.sqrt()
}

/// Nested and coupled distances between two paired laws of laws, each with
/// an error bar of [`MC_Z`] standard deviations over [`MC_RESAMPLES`]
/// resamples of the replicate indices (the same indices on both arms).
pub fn paired_estimate(lp: &LawOfLaws, lq: &LawOfLaws, nested: bool, coupled: bool, seed: u64) -> Result<PairedEstimate> {
    let r = lp.replicates.len();
    if r != lq.replicates.len() || r < 2 {
        return Err(Error::domain("paired estimates need two arms with the same number (>= 2) of replicates"));
    }
    if nested {
        check_outer(&lp.measure)?;
        check_outer(&lq.measure)?;
    }
    let pairing = Pairing::new(lp, lq)?;
    let all: Vec<usize> = (0..r).collect();
    let (nested_value, coupled_value) = pairing.evaluate(&all, nested)?;
    let resampled: Vec<(f64, f64)> = (0..MC_RESAMPLES)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(derive(seed, b as u64), stream::OUTER_RESAMPLE);
            let picks: Vec<usize> = (0..r).map(|_| rng.random_range(0..r)).collect();
            pairing.evaluate(&picks, nested)
        })
        .collect::<Result<_>>()?;
    let nested_draws: Vec<f64> = resampled.iter().map(|v| v.0).collect();
    let coupled_draws: Vec<f64> = resampled.iter().map(|v| v.1).collect();
    Ok(PairedEstimate {
        nested: nested.then_some(nested_value),
        coupled: coupled.then_some(coupled_value),
        err_nested: nested.then(|| half_width(&nested_draws)),
        err_coupled: coupled.then(|| half_width(&coupled_draws)),
    })
}
