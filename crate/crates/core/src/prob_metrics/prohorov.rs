use serde::{Deserialize, Serialize};

use super::bl::BL_MAX_SUPPORT;
use super::maxflow::FlowNetwork;
use crate::measures::{DiscreteMeasure, MetricSpace};
use crate::{Error, Result};

/// Resolution of the bisection over `eps`.
pub const PROHOROV_TOL: f64 = 1e-12;

const FEASIBLE_SLACK: f64 = 1e-12;
/// Stand-in for an unbounded arc; total flow never exceeds one.
const BIG: f64 = 4.0;

/// The Prohorov distance together with a set certifying that no smaller
/// value works.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProhorovCertificate {
    pub epsilon: f64,
    /// Indices into the support of `p` forming a set `A` with
    /// `P(A) > Q(A^e) + e` at `e = witness_epsilon`.
    pub witness_set: Option<Vec<usize>>,
    pub witness_epsilon: f64,
}

struct Instance {
    p: Vec<f64>,
    q: Vec<f64>,
    /// `d[i][j]` between atom `i` of `p` and atom `j` of `q`.
    d: Vec<Vec<f64>>,
}

impl Instance {
    fn network(&self, eps: f64) -> (FlowNetwork, usize, usize) {
        let (np, nq) = (self.p.len(), self.q.len());
        let s = np + nq + 1;
        let t = s + 1;
        let slack = np + nq;
        let mut g = FlowNetwork::new(np + nq + 3);
        for i in 0..np {
            g.add_edge(s, i, self.p[i]);
            g.add_edge(i, slack, BIG);
            for j in 0..nq {
                if self.d[i][j] <= eps {
                    g.add_edge(i, np + j, BIG);
                }
            }
        }
        for j in 0..nq {
            g.add_edge(np + j, t, self.q[j]);
        }
        g.add_edge(slack, t, eps);
        (g, s, t)
    }

    /// Strassen's condition `P(A) <= Q(A^eps) + eps` for every `A`, decided
    /// by whether all of `p`'s mass can be routed.
    fn feasible(&self, eps: f64) -> bool {
        let (mut g, s, t) = self.network(eps);
        let total: f64 = self.p.iter().sum();
        g.max_flow(s, t) >= total - FEASIBLE_SLACK
    }

    fn witness(&self, eps: f64) -> Option<Vec<usize>> {
        let (mut g, s, t) = self.network(eps);
        g.max_flow(s, t);
        let side = g.source_side(s);
        let a: Vec<usize> = (0..self.p.len()).filter(|&i| side[i]).collect();
        let pa: f64 = a.iter().map(|&i| self.p[i]).sum();
        let qa = self.neighbourhood_mass(&a, eps);
        (!a.is_empty() && pa > qa + eps).then_some(a)
    }

    fn neighbourhood_mass(&self, a: &[usize], eps: f64) -> f64 {
        (0..self.q.len())
            .filter(|&j| a.iter().any(|&i| self.d[i][j] <= eps))
            .map(|j| self.q[j])
            .sum()
    }
}

/// Prohorov distance: the smallest `eps` with `P(A) <= Q(A^eps) + eps` for
/// every event `A`, where `A^eps` is the closed `eps`-neighbourhood.
pub fn prohorov_distance<S: MetricSpace>(
    p: &DiscreteMeasure<S::Point>,
    q: &DiscreteMeasure<S::Point>,
    space: &S,
) -> Result<f64> {
    Ok(prohorov_with_certificate(p, q, space)?.epsilon)
}

pub fn prohorov_with_certificate<S: MetricSpace>(
    p: &DiscreteMeasure<S::Point>,
    q: &DiscreteMeasure<S::Point>,
    space: &S,
) -> Result<ProhorovCertificate> {
    let k = p.len() + q.len();
    if k > BL_MAX_SUPPORT {
        return Err(Error::Capacity {
            what: "union support size",
            actual: k,
            limit: BL_MAX_SUPPORT,
        });
    }
    let d: Vec<Vec<f64>> = p
        .support()
        .iter()
        .map(|x| q.support().iter().map(|y| space.dist(x, y)).collect())
        .collect();
    prohorov_from_matrix(p.weights(), q.weights(), d)
}

/// Prohorov distance between weights `p` and `q` on two finite sets with
/// cross distances `d`.
pub fn prohorov_from_matrix(p: &[f64], q: &[f64], d: Vec<Vec<f64>>) -> Result<ProhorovCertificate> {
    if d.len() != p.len() || d.iter().any(|r| r.len() != q.len()) {
        return Err(Error::domain("distance matrix shape does not match the supports"));
    }
    let inst = Instance {
        p: p.to_vec(),
        q: q.to_vec(),
        d,
    };
    if inst.feasible(0.0) {
        return Ok(ProhorovCertificate {
            epsilon: 0.0,
            witness_set: None,
            witness_epsilon: 0.0,
        });
    }
    let dmax = inst.d.iter().flatten().fold(0.0_f64, |a, &b| a.max(b));
    let mut hi = dmax.min(1.0);
    let mut lo = 0.0;
    while hi - lo > PROHOROV_TOL {
        let mid = 0.5 * (lo + hi);
        if inst.feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ProhorovCertificate {
        epsilon: hi,
        witness_set: inst.witness(lo),
        witness_epsilon: lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::RealLine;

    #[test]
    fn identical_is_zero() {
        let p = DiscreteMeasure::new(vec![0.0, 0.3, 0.8], vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(prohorov_distance(&p, &p, &RealLine).unwrap(), 0.0);
    }

    #[test]
    fn diracs() {
        for t in [0.1, 0.4, 0.99, 1.5, 3.0] {
            let d = prohorov_distance(&DiscreteMeasure::dirac(0.0), &DiscreteMeasure::dirac(t), &RealLine).unwrap();
            assert!((d - t.min(1.0)).abs() < 1e-9, "{t}: {d}");
        }
    }

    #[test]
    fn witness_violates_condition() {
        let p = DiscreteMeasure::new(vec![0.0, 1.0], vec![0.7, 0.3]).unwrap();
        let q = DiscreteMeasure::new(vec![0.5, 1.0], vec![0.6, 0.4]).unwrap();
        let cert = prohorov_with_certificate(&p, &q, &RealLine).unwrap();
        let a = cert.witness_set.expect("positive distance has a witness");
        let e = cert.witness_epsilon;
        let pa: f64 = a.iter().map(|&i| p.weights()[i]).sum();
        let qa: f64 = q
            .iter()
            .filter(|(y, _)| a.iter().any(|&i| (p.support()[i] - **y).abs() <= e))
            .map(|(_, w)| w)
            .sum();
        assert!(pa > qa + e);
    }

    #[test]
    fn two_point_shift() {
        // Moving mass 0.3 from 0 to 1: with eps < 0.3 the set {0} has
        // P({0}) = 0.6 + 0.3 but Q({0}) = 0.6; eps = 0.3 suffices.
        let p = DiscreteMeasure::new(vec![0.0, 1.0], vec![0.9, 0.1]).unwrap();
        let q = DiscreteMeasure::new(vec![0.0, 1.0], vec![0.6, 0.4]).unwrap();
        let d = prohorov_distance(&p, &q, &RealLine).unwrap();
        assert!((d - 0.3).abs() < 1e-9, "{d}");
    }
}
