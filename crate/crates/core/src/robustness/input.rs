use serde::{Deserialize, Serialize};

use crate::measures::{DiscreteMeasure, Point, ProductNorm, ProductSpace, Tuple};
use crate::prob_metrics::bl_distance;
use crate::processes::{
    gross_error_count, marginal_law, mixture_marginal, stationary_distribution, ContaminationMode, ProcessKind,
    ProcessSpec, DEFAULT_RESOLUTION,
};
use crate::{Error, Result};

/// Joint laws are computed exactly up to this path length.
pub const JOINT_MAX_N: usize = 3;
/// Cap on the atoms of an exact joint law.
pub const JOINT_MAX_ATOMS: usize = 216;

/// Input-side distances for one path length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputDistance {
    /// `d_BL` between the mixture marginals `(1/n) sum_i P^i` and
    /// `(1/n) sum_i Q^i`, a lower bound on the joint distance.
    pub mixture: f64,
    /// Discretization resolution of the two mixtures.
    pub resolution: f64,
    /// `d_BL(P_n, Q_n)` on `Z^n` with the max-product metric, when both joint
    /// laws are finite and small.
    pub joint: Option<f64>,
}

/// Mixture proxy for `d_BL(P_n, Q_n)`, plus the exact joint distance for
/// tiny finite instances.
pub fn input_distance_proxy(p: &ProcessSpec, q: &ProcessSpec, n: usize) -> Result<InputDistance> {
    input_distance_with(p, q, n, DEFAULT_RESOLUTION)
}

pub fn input_distance_with(p: &ProcessSpec, q: &ProcessSpec, n: usize, resolution: usize) -> Result<InputDistance> {
    if p.ground != q.ground {
        return Err(Error::domain("input distance needs a common ground box"));
    }
    let mp = mixture_marginal(p, n, resolution)?;
    let mq = mixture_marginal(q, n, resolution)?;
    let (mixture, _) = bl_distance(&mp.measure, &mq.measure, &p.ground)?;
    let joint = match (joint_law(p, n)?, joint_law(q, n)?) {
        (Some(jp), Some(jq)) => {
            let space = ProductSpace::new(p.ground, n, ProductNorm::Max);
            Some(bl_distance(&jp, &jq, &space)?.0)
        }
        _ => None,
    };
    Ok(InputDistance {
        mixture,
        resolution: mp.resolution.max(mq.resolution),
        joint,
    })
}

/// Exact law of `(Z_1, ..., Z_n)` when it is finite and small: `n` at most
/// [`JOINT_MAX_N`], discrete marginals, no rounding noise. `None` otherwise.
pub fn joint_law(spec: &ProcessSpec, n: usize) -> Result<Option<DiscreteMeasure<Tuple<Point>>>> {
    spec.validate()?;
    if n == 0 || n > JOINT_MAX_N {
        return Ok(None);
    }
    let mut ideal = spec.clone();
    ideal.contamination = None;
    let mut atoms: Vec<(Vec<Point>, f64)> = match &spec.kind {
        ProcessKind::MarkovChain { transition, .. } => {
            let states = spec.chain_states().expect("markov spec has states");
            let pi = stationary_distribution(transition)?;
            let s = states.len();
            if s.pow(n as u32) > JOINT_MAX_ATOMS {
                return Ok(None);
            }
            let mut out: Vec<(Vec<usize>, f64)> = (0..s).map(|k| (vec![k], pi[k])).collect();
            for _ in 1..n {
                out = out
                    .into_iter()
                    .flat_map(|(seq, w)| {
                        let last = *seq.last().unwrap();
                        (0..s).map(move |k| {
                            let mut t = seq.clone();
                            t.push(k);
                            (t, w * transition[last][k])
                        })
                    })
                    .collect();
            }
            out.into_iter()
                .map(|(seq, w)| (seq.iter().map(|&k| states[k]).collect(), w))
                .collect()
        }
        ProcessKind::Ar1Transformed { .. } => return Ok(None),
        _ => {
            let marginals: Vec<DiscreteMeasure<Point>> = (1..=n)
                .map(|i| marginal_law(&ideal, i, n, DEFAULT_RESOLUTION))
                .map(|d| d.map(|d| (d.resolution == 0.0).then_some(d.measure)))
                .collect::<Result<Option<_>>>()?
                .unwrap_or_default();
            if marginals.is_empty() {
                return Ok(None);
            }
            let mut out: Vec<(Vec<Point>, f64)> = vec![(Vec::new(), 1.0)];
            for m in &marginals {
                out = out
                    .into_iter()
                    .flat_map(|(prefix, w)| {
                        m.iter().map(move |(x, wx)| {
                            let mut t = prefix.clone();
                            t.push(*x);
                            (t, w * wx)
                        })
                    })
                    .collect();
                if out.len() > JOINT_MAX_ATOMS {
                    return Ok(None);
                }
            }
            out
        }
    };
    if let Some(c) = &spec.contamination {
        let target = c.target(&spec.ground);
        // weight of every replacement pattern (bit i set = position i replaced)
        let patterns: Vec<(u32, f64)> = match c.mode {
            ContaminationMode::Rounding if c.magnitude > 0.0 => return Ok(None),
            ContaminationMode::Rounding => vec![(0, 1.0)],
            ContaminationMode::GrossError => {
                let k = gross_error_count(c.fraction, n) as u32;
                let subsets: Vec<u32> = (0u32..1 << n).filter(|m| m.count_ones() == k).collect();
                let w = 1.0 / subsets.len() as f64;
                subsets.into_iter().map(|m| (m, w)).collect()
            }
            ContaminationMode::DistributionShift => (0u32..1 << n)
                .map(|m| {
                    let r = m.count_ones() as i32;
                    (m, c.fraction.powi(r) * (1.0 - c.fraction).powi(n as i32 - r))
                })
                .filter(|(_, w)| *w > 0.0)
                .collect(),
        };
        let mut next = Vec::new();
        for (mask, pw) in patterns {
            for (x, w) in &atoms {
                let mut partial: Vec<(Vec<Point>, f64)> = vec![(x.clone(), w * pw)];
                for i in (0..n).filter(|i| mask >> i & 1 == 1) {
                    partial = partial
                        .into_iter()
                        .flat_map(|(t, tw)| {
                            target.iter().map(move |(y, wy)| {
                                let mut u = t.clone();
                                u[i] = *y;
                                (u, tw * wy)
                            })
                        })
                        .collect();
                }
                next.extend(partial);
            }
            if next.len() > 4 * JOINT_MAX_ATOMS {
                return Ok(None);
            }
        }
        atoms = next;
    }
    let (support, masses): (Vec<Tuple<Point>>, Vec<f64>) = atoms.into_iter().map(|(t, w)| (Tuple(t), w)).unzip();
    let m = DiscreteMeasure::from_masses(support, masses)?;
    Ok((m.len() <= JOINT_MAX_ATOMS).then_some(m))
}
