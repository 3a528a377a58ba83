use serde::{Deserialize, Serialize};

use super::line::solve_line;
use crate::lp::Simplex;
use crate::measures::{Atom, DiscreteMeasure, MetricSpace};
use crate::{Error, Result};

/// Default cap on the union support size of a bounded-Lipschitz problem.
pub const BL_MAX_SUPPORT: usize = 2000;

/// Feasibility slack used when checking certificates.
pub const CERT_TOL: f64 = 1e-9;

const CUT_TOL: f64 = 1e-11;
const INITIAL_NEIGHBOURS: usize = 3;
const MAX_CUT_ROUNDS: usize = 500;

/// Which algorithm computes the bounded-Lipschitz distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlSolver {
    /// Exact chain solver when every atom has a line coordinate, simplex
    /// otherwise.
    #[default]
    Auto,
    /// Always the dense simplex with cutting planes.
    Simplex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlOptions {
    pub max_support: usize,
    pub solver: BlSolver,
}

impl Default for BlOptions {
    fn default() -> Self {
        BlOptions {
            max_support: BL_MAX_SUPPORT,
            solver: BlSolver::Auto,
        }
    }
}

/// An optimal dual witness `f` for the bounded-Lipschitz distance, given on
/// the union support of the two measures (see [`union_support`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlCertificate {
    pub function_values: Vec<f64>,
    /// Lipschitz constant budget `L`.
    pub lipschitz_part: f64,
    /// Sup-norm budget `M`.
    pub sup_part: f64,
    /// `sum_i (p_i - q_i) f_i`.
    pub objective: f64,
}

impl BlCertificate {
    fn zero(k: usize) -> Self {
        BlCertificate {
            function_values: vec![0.0; k],
            lipschitz_part: 0.0,
            sup_part: 0.0,
            objective: 0.0,
        }
    }

    /// Largest violation of the certificate constraints given the mass
    /// differences `c` and pairwise distances `dist(i, j)`.
    pub fn max_violation(&self, c: &[f64], dist: impl Fn(usize, usize) -> f64) -> f64 {
        let f = &self.function_values;
        let (l, m) = (self.lipschitz_part, self.sup_part);
        let mut worst = (l + m - 1.0).max(0.0);
        for i in 0..f.len() {
            worst = worst.max(f[i].abs() - m);
            for j in i + 1..f.len() {
                worst = worst.max((f[i] - f[j]).abs() - l * dist(i, j));
            }
        }
        let obj: f64 = c.iter().zip(f).map(|(ci, fi)| ci * fi).sum();
        worst.max((obj - self.objective).abs())
    }
}

/// Union of the two supports in canonical order with the mass each
/// measure puts on every union point.
pub fn union_support<T: Atom>(p: &DiscreteMeasure<T>, q: &DiscreteMeasure<T>) -> (Vec<T>, Vec<f64>, Vec<f64>) {
    let (ps, qs) = (p.support(), q.support());
    let (pw, qw) = (p.weights(), q.weights());
    let mut points = Vec::with_capacity(ps.len() + qs.len());
    let mut wp = Vec::with_capacity(ps.len() + qs.len());
    let mut wq = Vec::with_capacity(ps.len() + qs.len());
    let (mut i, mut j) = (0, 0);
    while i < ps.len() || j < qs.len() {
        if j == qs.len() || (i < ps.len() && !ps[i].same_atom(&qs[j]) && ps[i].canonical_cmp(&qs[j]).is_lt()) {
            points.push(ps[i].clone());
            wp.push(pw[i]);
            wq.push(0.0);
            i += 1;
        } else if i == ps.len() || !ps[i].same_atom(&qs[j]) {
            points.push(qs[j].clone());
            wp.push(0.0);
            wq.push(qw[j]);
            j += 1;
        } else {
            points.push(ps[i].clone());
            wp.push(pw[i]);
            wq.push(qw[j]);
            i += 1;
            j += 1;
        }
    }
    (points, wp, wq)
}

/// Bounded-Lipschitz distance `sup { |int f dP - int f dQ| : |f|_L + |f|_inf <= 1 }`
/// between two discrete measures, with an optimal witness.
pub fn bl_distance<S: MetricSpace>(
    p: &DiscreteMeasure<S::Point>,
    q: &DiscreteMeasure<S::Point>,
    space: &S,
) -> Result<(f64, BlCertificate)> {
    bl_distance_with(p, q, space, &BlOptions::default())
}

pub fn bl_distance_with<S: MetricSpace>(
    p: &DiscreteMeasure<S::Point>,
    q: &DiscreteMeasure<S::Point>,
    space: &S,
    opts: &BlOptions,
) -> Result<(f64, BlCertificate)> {
    let (points, wp, wq) = union_support(p, q);
    let k = points.len();
    if k > opts.max_support {
        return Err(Error::Capacity {
            what: "union support size",
            actual: k,
            limit: opts.max_support,
        });
    }
    let c: Vec<f64> = wp.iter().zip(&wq).map(|(a, b)| a - b).collect();
    if c.iter().all(|v| *v == 0.0) {
        return Ok((0.0, BlCertificate::zero(k)));
    }
    if opts.solver == BlSolver::Auto {
        let coords: Option<Vec<f64>> = points.iter().map(|x| space.line_coordinate(x)).collect();
        if let Some(xs) = coords {
            return Ok(bl_on_line(&xs, &c));
        }
    }
    let dist: Vec<Vec<f64>> = points
        .iter()
        .map(|x| points.iter().map(|y| space.dist(x, y)).collect())
        .collect();
    bl_from_matrix(&c, &dist)
}

/// The line solver on already-merged points. `xs` need not be sorted.
pub fn bl_on_line(xs: &[f64], c: &[f64]) -> (f64, BlCertificate) {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let sx: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let sc: Vec<f64> = order.iter().map(|&i| c[i]).collect();
    let (value, lip, sf) = solve_line(&sx, &sc);
    let mut f = vec![0.0; xs.len()];
    for (pos, &i) in order.iter().enumerate() {
        f[i] = sf[pos];
    }
    let value = value.max(0.0);
    (
        value,
        BlCertificate {
            function_values: f,
            lipschitz_part: lip,
            sup_part: 1.0 - lip,
            objective: value,
        },
    )
}

/// Bounded-Lipschitz linear program for mass differences `c` over points
/// with the given distance matrix, solved by the dense simplex.
///
/// Variables are `h_i = f_i + M >= 0`, `L` and `M`; since `sum c_i = 0` the
/// objective is `sum c_i h_i`. Rows: `h_i <= 2M`, `L + M <= 1`, and the
/// Lipschitz rows `h_i - h_j <= d_ij L`, which are generated lazily starting
/// from each point's nearest neighbours until none is violated.
pub fn bl_from_matrix(c: &[f64], dist: &[Vec<f64>]) -> Result<(f64, BlCertificate)> {
    let k = c.len();
    if dist.len() != k || dist.iter().any(|r| r.len() != k) {
        return Err(Error::domain("distance matrix shape does not match the support"));
    }
    if dist.iter().flatten().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::domain("distance matrix has a negative or non-finite entry"));
    }
    if c.iter().all(|v| *v == 0.0) {
        return Ok((0.0, BlCertificate::zero(k)));
    }
    if k == 1 {
        return Ok((0.0, BlCertificate::zero(1)));
    }
    let nv = k + 2;
    let (il, im) = (k, k + 1);
    let mut obj = vec![0.0; nv];
    obj[..k].copy_from_slice(c);

    let mut rows = Vec::with_capacity(k + 1);
    let mut rhs = Vec::with_capacity(k + 1);
    for i in 0..k {
        let mut r = vec![0.0; nv];
        r[i] = 1.0;
        r[im] = -2.0;
        rows.push(r);
        rhs.push(0.0);
    }
    let mut budget = vec![0.0; nv];
    budget[il] = 1.0;
    budget[im] = 1.0;
    rows.push(budget);
    rhs.push(1.0);

    let lip_row = |i: usize, j: usize| {
        let mut r = vec![0.0; nv];
        r[i] = 1.0;
        r[j] = -1.0;
        r[il] = -dist[i][j];
        (r, 0.0)
    };

    let mut present = vec![false; k * k];
    let mut initial = Vec::new();
    for i in 0..k {
        let mut nbrs: Vec<usize> = (0..k).filter(|&j| j != i).collect();
        nbrs.sort_by(|&a, &b| dist[i][a].total_cmp(&dist[i][b]));
        for &j in nbrs.iter().take(INITIAL_NEIGHBOURS) {
            for (a, b) in [(i, j), (j, i)] {
                if !present[a * k + b] {
                    present[a * k + b] = true;
                    initial.push(lip_row(a, b));
                }
            }
        }
    }
    for (r, b) in initial {
        rows.push(r);
        rhs.push(b);
    }

    let mut lp = Simplex::new(&obj, &rows, &rhs)?;
    let mut sol = lp.solve()?;
    let mut rounds = 0;
    loop {
        let h = &sol.x[..k];
        let l = sol.x[il];
        let mut cuts = Vec::new();
        for i in 0..k {
            let mut best = (CUT_TOL, usize::MAX);
            for j in 0..k {
                let v = h[i] - h[j] - dist[i][j] * l;
                if v > best.0 && !present[i * k + j] {
                    best = (v, j);
                }
            }
            if best.1 != usize::MAX {
                present[i * k + best.1] = true;
                cuts.push(lip_row(i, best.1));
            }
        }
        if cuts.is_empty() {
            break;
        }
        rounds += 1;
        if rounds > MAX_CUT_ROUNDS {
            return Err(Error::Numeric {
                message: "cutting-plane loop did not settle".into(),
                iterations: sol.iterations,
            });
        }
        sol = lp.add_rows(&cuts)?;
    }

    let m = sol.x[im];
    let l = sol.x[il];
    let f: Vec<f64> = sol.x[..k].iter().map(|h| (h - m).clamp(-m, m)).collect();
    let value: f64 = c.iter().zip(&f).map(|(ci, fi)| ci * fi).sum();
    let cert = BlCertificate {
        function_values: f,
        lipschitz_part: l,
        sup_part: m,
        objective: value,
    };
    let viol = cert.max_violation(c, |i, j| dist[i][j]);
    if viol > CERT_TOL {
        return Err(Error::Numeric {
            message: format!("certificate violates constraints by {viol:e}"),
            iterations: sol.iterations,
        });
    }
    Ok((value.max(0.0), cert))
}
