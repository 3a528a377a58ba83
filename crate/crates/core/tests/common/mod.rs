//! Brute-force oracles and random instance generators shared by the
//! integration tests. Nothing here calls into the solvers under test.

#![allow(dead_code)]

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qrboot::measures::{DiscreteMeasure, Point};

/// Minimum-cost transport between weights `p` and `q` under `cost`, by
/// successive shortest paths with Bellman-Ford on the residual graph.
pub fn transport_cost(p: &[f64], q: &[f64], cost: &[Vec<f64>]) -> f64 {
    let (m, k) = (p.len(), q.len());
    let mut supply = p.to_vec();
    let mut demand = q.to_vec();
    let mut flow = vec![vec![0.0; k]; m];
    // nodes: 0..m sources, m..m+k sinks
    loop {
        let remaining: f64 = supply.iter().sum();
        if remaining < 1e-14 {
            break;
        }
        let nodes = m + k;
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev: Vec<Option<usize>> = vec![None; nodes];
        for i in 0..m {
            if supply[i] > 1e-15 {
                dist[i] = 0.0;
            }
        }
        for _ in 0..nodes {
            let mut changed = false;
            for i in 0..m {
                for j in 0..k {
                    if dist[i] + cost[i][j] < dist[m + j] - 1e-15 {
                        dist[m + j] = dist[i] + cost[i][j];
                        prev[m + j] = Some(i);
                        changed = true;
                    }
                    if flow[i][j] > 1e-15 && dist[m + j] - cost[i][j] < dist[i] - 1e-15 {
                        dist[i] = dist[m + j] - cost[i][j];
                        prev[i] = Some(m + j);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let sink = (0..k)
            .filter(|&j| demand[j] > 1e-15 && dist[m + j].is_finite())
            .min_by(|&a, &b| dist[m + a].total_cmp(&dist[m + b]))
            .expect("a reachable sink while supply remains");
        // walk back to the source that roots the shortest-path tree
        let mut path = vec![m + sink];
        let mut node = m + sink;
        while let Some(pn) = prev[node] {
            path.push(pn);
            node = pn;
        }
        path.reverse();
        let src = path[0];
        let mut amount = supply[src].min(demand[sink]);
        for w in path.windows(2) {
            if w[0] >= m {
                amount = amount.min(flow[w[1]][w[0] - m]);
            }
        }
        for w in path.windows(2) {
            if w[0] < m {
                flow[w[0]][w[1] - m] += amount;
            } else {
                flow[w[1]][w[0] - m] -= amount;
            }
        }
        supply[src] -= amount;
        demand[sink] -= amount;
    }
    flow.iter()
        .zip(cost)
        .map(|(f, c)| f.iter().zip(c).map(|(a, b)| a * b).sum::<f64>())
        .sum()
}

/// Bounded-Lipschitz distance by brute force over the budget split.
///
/// For fixed `L` and `M = 1 - L` the inner supremum is the transport cost
/// under `min(L d, 2M)`. That value is concave in `L`, so a grid of step
/// `1e-3` followed by golden-section refinement of the best cell finds the
/// maximum.
pub fn bl_oracle(p: &DiscreteMeasure<Point>, q: &DiscreteMeasure<Point>) -> f64 {
    let d: Vec<Vec<f64>> = p
        .support()
        .iter()
        .map(|x| q.support().iter().map(|y| x.euclidean(y)).collect())
        .collect();
    bl_oracle_from(p.weights(), q.weights(), &d)
}

/// [`bl_oracle`] for weights on two finite sets with cross distances `d`.
pub fn bl_oracle_from(pw: &[f64], qw: &[f64], d: &[Vec<f64>]) -> f64 {
    let value = |l: f64| {
        let m = 1.0 - l;
        let cost: Vec<Vec<f64>> = d.iter().map(|r| r.iter().map(|v| (l * v).min(2.0 * m)).collect()).collect();
        transport_cost(pw, qw, &cost)
    };
    let steps = 1000;
    let (mut best_k, mut best) = (0, f64::NEG_INFINITY);
    for k in 0..=steps {
        let v = value(k as f64 / steps as f64);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let h = 1.0 / steps as f64;
    let (mut a, mut b) = (((best_k as f64 - 1.0) * h).max(0.0), ((best_k as f64 + 1.0) * h).min(1.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if value(x1) < value(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    best.max(value(0.5 * (a + b)))
}

/// Prohorov distance by enumerating every subset `A` of the support of
/// `p` and the smallest `eps` with `P(A) <= Q(A^eps) + eps`.
pub fn prohorov_oracle(p: &DiscreteMeasure<Point>, q: &DiscreteMeasure<Point>) -> f64 {
    let (ps, qs) = (p.support(), q.support());
    let mut worst: f64 = 0.0;
    for mask in 1u32..(1 << ps.len()) {
        let members: Vec<usize> = (0..ps.len()).filter(|i| mask & (1 << i) != 0).collect();
        let mass_a: f64 = members.iter().map(|&i| p.weights()[i]).sum();
        let gap: Vec<f64> = qs
            .iter()
            .map(|y| members.iter().map(|&i| ps[i].euclidean(y)).fold(f64::INFINITY, f64::min))
            .collect();
        let mut levels = vec![0.0];
        levels.extend(gap.iter().copied());
        let eps_a = levels
            .iter()
            .map(|&t| {
                let covered: f64 = gap.iter().zip(q.weights()).filter(|(g, _)| **g <= t).map(|(_, w)| w).sum();
                t.max(mass_a - covered)
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(eps_a);
    }
    worst.min(1.0)
}

/// Random measure with `1..=max_atoms` atoms in `[0, 1]^dim`.
pub fn random_measure(rng: &mut ChaCha8Rng, max_atoms: usize, dim: usize) -> DiscreteMeasure<Point> {
    let k = rng.random_range(1..=max_atoms);
    let pts = (0..k)
        .map(|_| Point::new(&(0..dim).map(|_| rng.random::<f64>()).collect::<Vec<_>>()))
        .collect();
    let masses = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    DiscreteMeasure::from_masses(pts, masses).expect("valid random measure")
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Prints one status line straight to stderr so it survives output capture.
pub fn report(id: u32, name: &str, pass: bool, detail: &str, started: Instant) {
    let status = if pass { "PASS" } else { "FAIL" };
    let line = format!(
        "criterion {id:>2} {status} {name}: {detail} ({:.2} s)\n",
        started.elapsed().as_secs_f64()
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}
