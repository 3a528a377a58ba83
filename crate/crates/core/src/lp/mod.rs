//! Dense tableau simplex for `max c.x  s.t.  A x <= b, x >= 0`.
//!
//! With `b >= 0` the slack basis is feasible from the start, so no phase one
//! is needed. Rows can be appended to a solved tableau; the dual simplex then
//! restores primal feasibility, which is how cutting-plane callers add
//! constraints.
//!
//! Pivoting uses Dantzig's most-negative reduced cost while progress is
//! strict and falls back to Bland's smallest-index rule after a run of
//! degenerate pivots, which rules out cycling. Degenerate ties are broken up
//! by a tiny right-hand-side perturbation that is removed before the answer
//! is read off. Every claimed optimum is checked against the original data
//! (primal residuals, dual signs, duality gap); if the tableau has drifted it
//! is rebuilt from the basis and the search resumes.

use crate::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-10;
const OPT_TOL: f64 = 1e-10;
const VERIFY_TOL: f64 = 1e-9;
const PERTURB: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;
const MAX_REPAIRS: usize = 4;
const SINGULAR_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest-index entering and leaving variable on every pivot.
    Bland,
    /// Dantzig pricing with a switch to Bland after repeated degenerate steps.
    DantzigThenBland,
}

#[derive(Debug, Clone)]
pub struct Simplex {
    n_struct: usize,
    /// Original constraint rows, objective and right-hand side.
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// Row-major `B^-1 [A I]`.
    rows: Vec<Vec<f64>>,
    /// `B^-1 (b + delta)`.
    rhs: Vec<f64>,
    /// Reduced costs `c_B B^-1 A_j - c_j`; optimal when all are `>= 0`.
    z: Vec<f64>,
    basis: Vec<usize>,
    /// Perturbation currently added to each row's right-hand side.
    delta: Vec<f64>,
    rule: PivotRule,
    iterations: usize,
    max_iterations: usize,
}

/// Outcome of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

fn perturbation(i: usize, scale: f64) -> f64 {
    PERTURB * scale * (1.0 + ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
}

impl Simplex {
    /// Sets up the tableau. Every `b_i` must be nonnegative.
    pub fn new(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        let n = c.len();
        if a.len() != b.len() {
            return Err(Error::domain("constraint matrix and rhs disagree in length"));
        }
        if a.iter().any(|r| r.len() != n) {
            return Err(Error::domain("constraint row length differs from objective length"));
        }
        if b.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::domain("simplex needs a nonnegative right-hand side"));
        }
        let m = a.len();
        let cols = n + m;
        let rows = a
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = Vec::with_capacity(cols);
                row.extend_from_slice(r);
                row.resize(cols, 0.0);
                row[n + i] = 1.0;
                row
            })
            .collect();
        let mut z = vec![0.0; cols];
        for (zj, cj) in z.iter_mut().zip(c) {
            *zj = -cj;
        }
        Ok(Simplex {
            n_struct: n,
            a: a.to_vec(),
            b: b.to_vec(),
            c: c.to_vec(),
            rows,
            rhs: b.to_vec(),
            z,
            basis: (n..n + m).collect(),
            delta: vec![0.0; m],
            rule: PivotRule::DantzigThenBland,
            iterations: 0,
            max_iterations: 200_000,
        })
    }

    pub fn with_rule(mut self, rule: PivotRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_max_iterations(mut self, max: usize) -> Self {
        self.max_iterations = max;
        self
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    fn n_cols(&self) -> usize {
        self.z.len()
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j];
        let inv = 1.0 / p;
        for v in self.rows[r].iter_mut() {
            *v *= inv;
        }
        self.rhs[r] *= inv;
        self.rows[r][j] = 1.0;
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r];
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[j] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
            }
        }
        let f = self.z[j];
        if f != 0.0 {
            for (v, pv) in self.z.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.z[j] = 0.0;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = j;
        self.iterations += 1;
    }

    fn check_budget(&self) -> Result<()> {
        if self.iterations >= self.max_iterations {
            return Err(Error::Numeric {
                message: "simplex iteration limit reached".into(),
                iterations: self.iterations,
            });
        }
        Ok(())
    }

    /// Switches the right-hand-side perturbation on or off, shifting the
    /// basic values by `B^-1 (new - old)`; column `n + i` holds `B^-1 e_i`.
    fn set_perturbation(&mut self, on: bool) {
        let scale = self.b.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        let target: Vec<f64> = (0..self.delta.len())
            .map(|i| if on { perturbation(i, scale) } else { 0.0 })
            .collect();
        let n = self.n_struct;
        let shift: Vec<(usize, f64)> = target
            .iter()
            .zip(&self.delta)
            .enumerate()
            .map(|(i, (t, d))| (i, t - d))
            .filter(|(_, s)| *s != 0.0)
            .collect();
        if shift.is_empty() {
            return;
        }
        for (row, r) in self.rows.iter().zip(self.rhs.iter_mut()) {
            *r += shift.iter().map(|&(i, s)| s * row[n + i]).sum::<f64>();
        }
        self.delta = target;
    }

    fn primal(&mut self) -> Result<()> {
        let mut degenerate = 0usize;
        loop {
            self.check_budget()?;
            let use_bland = self.rule == PivotRule::Bland || degenerate >= DEGENERATE_RUN;
            let entering = if use_bland {
                self.z.iter().position(|&v| v < -OPT_TOL)
            } else {
                let mut best = None;
                let mut best_v = -OPT_TOL;
                for (j, &v) in self.z.iter().enumerate() {
                    if v < best_v {
                        best_v = v;
                        best = Some(j);
                    }
                }
                best
            };
            let Some(j) = entering else {
                return Ok(());
            };
            let ratio = |i: usize| self.rhs[i].max(0.0) / self.rows[i][j];
            let candidates: Vec<usize> = (0..self.rows.len()).filter(|&i| self.rows[i][j] > PIVOT_TOL).collect();
            if candidates.is_empty() {
                return Err(Error::Numeric {
                    message: format!("objective unbounded along column {j}"),
                    iterations: self.iterations,
                });
            }
            let r = if use_bland {
                let min = candidates.iter().map(|&i| ratio(i)).fold(f64::INFINITY, f64::min);
                *candidates
                    .iter()
                    .filter(|&&i| ratio(i) <= min + 1e-14)
                    .min_by_key(|&&i| self.basis[i])
                    .expect("a candidate attains the minimum")
            } else {
                // Harris: widen the minimum ratio by the feasibility slack and
                // take the largest pivot element inside it.
                let theta = candidates
                    .iter()
                    .map(|&i| (self.rhs[i].max(0.0) + FEAS_TOL) / self.rows[i][j])
                    .fold(f64::INFINITY, f64::min);
                *candidates
                    .iter()
                    .filter(|&&i| ratio(i) <= theta)
                    .max_by(|&&x, &&y| self.rows[x][j].total_cmp(&self.rows[y][j]))
                    .expect("the minimum ratio lies within theta")
            };
            if ratio(r) <= 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, j);
        }
    }

    fn dual(&mut self) -> Result<()> {
        loop {
            self.check_budget()?;
            let mut leave = None;
            let mut worst = -FEAS_TOL;
            for (i, &v) in self.rhs.iter().enumerate() {
                if v < worst {
                    worst = v;
                    leave = Some(i);
                }
            }
            let Some(r) = leave else {
                return Ok(());
            };
            let row = &self.rows[r];
            let theta = row
                .iter()
                .enumerate()
                .filter(|(_, &a)| a < -PIVOT_TOL)
                .map(|(j, &a)| (self.z[j].max(0.0) + OPT_TOL) / -a)
                .fold(f64::INFINITY, f64::min);
            if theta.is_infinite() {
                return Err(Error::Numeric {
                    message: "dual simplex found the constraints infeasible".into(),
                    iterations: self.iterations,
                });
            }
            let j = row
                .iter()
                .enumerate()
                .filter(|(j, &a)| a < -PIVOT_TOL && self.z[*j].max(0.0) / -a <= theta)
                .max_by(|x, y| (-x.1).total_cmp(&-y.1))
                .map(|(j, _)| j)
                .expect("the minimum ratio lies within theta");
            self.pivot(r, j);
        }
    }

    /// Rebuilds the tableau from the original data for the current basis,
    /// falling back to the slack basis if that basis has become singular.
    fn refactor(&mut self) -> Result<()> {
        let m = self.rows.len();
        let n = self.n_struct;
        let column = |j: usize, k: usize| if j < n { self.a[k][j] } else if j - n == k { 1.0 } else { 0.0 };
        // Gauss-Jordan on [B | I]
        let mut aug: Vec<Vec<f64>> = (0..m)
            .map(|k| {
                let mut row: Vec<f64> = self.basis.iter().map(|&j| column(j, k)).collect();
                row.extend((0..m).map(|i| f64::from(u8::from(i == k))));
                row
            })
            .collect();
        let mut singular = false;
        for col in 0..m {
            let p = (col..m)
                .max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))
                .expect("nonempty range");
            if aug[p][col].abs() < SINGULAR_TOL {
                singular = true;
                break;
            }
            aug.swap(col, p);
            let inv = 1.0 / aug[col][col];
            for v in aug[col].iter_mut() {
                *v *= inv;
            }
            let pr = aug[col].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r != col && row[col] != 0.0 {
                    let f = row[col];
                    for (v, pv) in row.iter_mut().zip(&pr) {
                        *v -= f * pv;
                    }
                }
            }
        }
        if singular {
            self.basis = (n..n + m).collect();
            aug = (0..m)
                .map(|k| {
                    let mut row = vec![0.0; m];
                    row.extend((0..m).map(|i| f64::from(u8::from(i == k))));
                    row
                })
                .collect();
        }
        // row r of B^-1 is aug[r][m..]
        let binv: Vec<&[f64]> = aug.iter().map(|r| &r[m..]).collect();
        for r in 0..m {
            let bi = binv[r];
            let row = &mut self.rows[r];
            for j in 0..n {
                row[j] = (0..m).map(|k| bi[k] * self.a[k][j]).sum();
            }
            row[n..n + m].copy_from_slice(bi);
            self.rhs[r] = (0..m).map(|k| bi[k] * (self.b[k] + self.delta[k])).sum();
        }
        let cb: Vec<f64> = self.basis.iter().map(|&j| if j < n { self.c[j] } else { 0.0 }).collect();
        for j in 0..n + m {
            let cj = if j < n { self.c[j] } else { 0.0 };
            self.z[j] = (0..m).map(|r| cb[r] * self.rows[r][j]).sum::<f64>() - cj;
        }
        for (r, &j) in self.basis.iter().enumerate() {
            self.z[j] = 0.0;
            for (i, row) in self.rows.iter_mut().enumerate() {
                row[j] = if i == r { 1.0 } else { 0.0 };
            }
        }
        Ok(())
    }

    /// Checks the current basis against the original problem.
    fn verified(&self) -> bool {
        let n = self.n_struct;
        let x = self.solution().x;
        let primal_ok = self.a.iter().zip(&self.b).all(|(row, &bi)| {
            let lhs: f64 = row.iter().zip(&x).map(|(a, v)| a * v).sum();
            lhs <= bi + VERIFY_TOL * (1.0 + bi.abs())
        });
        let y = &self.z[n..];
        let dual_sign_ok = y.iter().all(|&v| v >= -VERIFY_TOL);
        let reduced_ok = (0..n).all(|j| {
            let d: f64 = y.iter().zip(&self.a).map(|(yi, row)| yi * row[j]).sum::<f64>() - self.c[j];
            d >= -VERIFY_TOL * (1.0 + self.c[j].abs())
        });
        let primal_value: f64 = self.c.iter().zip(&x).map(|(c, v)| c * v).sum();
        let dual_value: f64 = y.iter().zip(&self.b).map(|(yi, bi)| yi * bi).sum();
        let gap_ok = (dual_value - primal_value).abs() <= VERIFY_TOL * (1.0 + primal_value.abs());
        primal_ok && dual_sign_ok && reduced_ok && gap_ok
    }

    fn optimize(&mut self) -> Result<LpSolution> {
        for _ in 0..=MAX_REPAIRS {
            self.set_perturbation(true);
            self.dual()?;
            self.primal()?;
            self.set_perturbation(false);
            self.dual()?;
            self.primal()?;
            if self.verified() {
                return Ok(self.solution());
            }
            self.refactor()?;
        }
        Err(Error::Numeric {
            message: "simplex lost accuracy and could not recover".into(),
            iterations: self.iterations,
        })
    }

    /// Runs the primal simplex to optimality.
    pub fn solve(&mut self) -> Result<LpSolution> {
        self.optimize()
    }

    /// Appends `a.x <= b` (over structural variables) to a solved tableau
    /// and re-optimizes with the dual simplex.
    pub fn add_rows(&mut self, new_rows: &[(Vec<f64>, f64)]) -> Result<LpSolution> {
        for (a, b) in new_rows {
            if a.len() != self.n_struct {
                return Err(Error::domain("cut row length differs from objective length"));
            }
            for row in self.rows.iter_mut() {
                row.push(0.0);
            }
            self.z.push(0.0);
            let cols = self.n_cols();
            let mut row = vec![0.0; cols];
            row[..self.n_struct].copy_from_slice(a);
            row[cols - 1] = 1.0;
            let mut rhs = *b;
            for (i, &bv) in self.basis.iter().enumerate() {
                let coef = if bv < self.n_struct { a[bv] } else { 0.0 };
                if coef != 0.0 {
                    for (v, tv) in row.iter_mut().zip(&self.rows[i]) {
                        *v -= coef * tv;
                    }
                    rhs -= coef * self.rhs[i];
                }
            }
            // entries in basic columns are zero up to rounding
            for &bv in &self.basis {
                row[bv] = 0.0;
            }
            self.rows.push(row);
            self.rhs.push(rhs);
            self.basis.push(cols - 1);
            self.delta.push(0.0);
            self.a.push(a.clone());
            self.b.push(*b);
        }
        self.optimize()
    }

    fn solution(&self) -> LpSolution {
        let mut x = vec![0.0; self.n_struct];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.n_struct {
                x[bv] = self.rhs[i].max(0.0);
            }
        }
        let objective = self.c.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpSolution {
            x,
            objective,
            iterations: self.iterations,
        }
    }
}

/// One-shot `max c.x  s.t.  A x <= b, x >= 0`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    Simplex::new(c, a, b)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let s = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert!((s.objective - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn bland_rule_agrees() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]];
        let s = Simplex::new(&[3.0, 5.0], &a, &[4.0, 12.0, 18.0])
            .unwrap()
            .with_rule(PivotRule::Bland)
            .solve()
            .unwrap();
        assert!((s.objective - 36.0).abs() < 1e-12);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's classic instance cycles under naive Dantzig pricing.
        let c = [0.75, -150.0, 1.0 / 50.0, -6.0];
        let a = vec![
            vec![0.25, -60.0, -1.0 / 25.0, 9.0],
            vec![0.5, -90.0, -1.0 / 50.0, 3.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ];
        let b = [0.0, 0.0, 1.0];
        for rule in [PivotRule::Bland, PivotRule::DantzigThenBland] {
            let s = Simplex::new(&c, &a, &b).unwrap().with_rule(rule).solve().unwrap();
            assert!((s.objective - 0.05).abs() < 1e-10, "{rule:?} {}", s.objective);
        }
    }

    #[test]
    fn unbounded_is_reported() {
        let e = maximize(&[1.0, 0.0], &[vec![0.0, 1.0]], &[1.0]).unwrap_err();
        assert!(matches!(e, Error::Numeric { .. }));
    }

    #[test]
    fn added_cut_matches_fresh_solve() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
        let mut s = Simplex::new(&[3.0, 5.0], &a, &[4.0, 12.0]).unwrap();
        let first = s.solve().unwrap();
        assert!((first.objective - 42.0).abs() < 1e-12);
        let cut = s.add_rows(&[(vec![3.0, 2.0], 18.0)]).unwrap();
        assert!((cut.objective - 36.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_rhs() {
        assert!(maximize(&[1.0], &[vec![1.0]], &[-1.0]).is_err());
    }
}
