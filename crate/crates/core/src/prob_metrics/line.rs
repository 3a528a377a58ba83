//! Exact bounded-Lipschitz optimization on the real line.
//!
//! For sorted points `x_1 < ... < x_k` every Lipschitz constraint follows
//! from the ones between neighbours, so for a fixed Lipschitz budget `L`
//! (and sup budget `M = 1 - L`) the problem
//!
//! ```text
//! max sum c_i f_i   s.t.  |f_i| <= M,  |f_{i+1} - f_i| <= L (x_{i+1} - x_i)
//! ```
//!
//! is a chain. Its value function `V_i(y)` (best partial objective with
//! `f_i = y`) is concave and piecewise linear. Moving to the next point
//! widens the argmax plateau by the allowed step, clips to `[-M, M]`, and
//! adds the linear term `c_{i+1} y`. Segments are kept in two deques
//! ordered outward from the plateau with one lazy slope offset, so each
//! point costs amortized O(1) plus the segments the argmax walks over.
//!
//! The optimal value is concave in `L`, which is maximized by golden
//! section search.

use std::collections::VecDeque;

const SLOPE_ZERO: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
struct Segment {
    len: f64,
    /// Slope minus the running offset.
    raw: f64,
}

struct Chain {
    m: f64,
    a: f64,
    b: f64,
    vmax: f64,
    shift: f64,
    /// Segments on `[-m, a]`; back is adjacent to the plateau.
    left: VecDeque<Segment>,
    /// Segments on `[b, m]`; back is adjacent to the plateau.
    right: VecDeque<Segment>,
}

impl Chain {
    fn new(m: f64) -> Self {
        Chain {
            m,
            a: -m,
            b: m,
            vmax: 0.0,
            shift: 0.0,
            left: VecDeque::new(),
            right: VecDeque::new(),
        }
    }

    fn add_linear(&mut self, c: f64) {
        if c == 0.0 {
            return;
        }
        self.shift += c;
        if c > 0.0 {
            self.vmax += c * self.b;
            let len = self.b - self.a;
            if len > 0.0 {
                self.left.push_back(Segment {
                    len,
                    raw: c - self.shift,
                });
            }
            self.a = self.b;
            while let Some(seg) = self.right.back().copied() {
                let slope = seg.raw + self.shift;
                if slope > SLOPE_ZERO {
                    self.right.pop_back();
                    self.vmax += slope * seg.len;
                    self.left.push_back(seg);
                    self.b += seg.len;
                    self.a = self.b;
                } else {
                    if slope >= -SLOPE_ZERO {
                        self.right.pop_back();
                        self.vmax += slope * seg.len;
                        self.b += seg.len;
                    }
                    break;
                }
            }
        } else {
            self.vmax += c * self.a;
            let len = self.b - self.a;
            if len > 0.0 {
                self.right.push_back(Segment {
                    len,
                    raw: c - self.shift,
                });
            }
            self.b = self.a;
            while let Some(seg) = self.left.back().copied() {
                let slope = seg.raw + self.shift;
                if slope < -SLOPE_ZERO {
                    self.left.pop_back();
                    self.vmax -= slope * seg.len;
                    self.right.push_back(seg);
                    self.a -= seg.len;
                    self.b = self.a;
                } else {
                    if slope <= SLOPE_ZERO {
                        self.left.pop_back();
                        self.vmax -= slope * seg.len;
                        self.a -= seg.len;
                    }
                    break;
                }
            }
        }
    }

    /// Replaces `V(y)` by `max_{|y' - y| <= r} V(y')` restricted to `[-m, m]`.
    fn widen(&mut self, r: f64) {
        if r <= 0.0 {
            return;
        }
        self.a -= r;
        self.b += r;
        if self.a <= -self.m {
            self.a = -self.m;
            self.left.clear();
        } else {
            trim(&mut self.left, r);
        }
        if self.b >= self.m {
            self.b = self.m;
            self.right.clear();
        } else {
            trim(&mut self.right, r);
        }
    }
}

fn trim(segs: &mut VecDeque<Segment>, mut excess: f64) {
    while excess > 0.0 {
        match segs.front_mut() {
            None => break,
            Some(front) if front.len <= excess => {
                excess -= front.len;
                segs.pop_front();
            }
            Some(front) => {
                front.len -= excess;
                excess = 0.0;
            }
        }
    }
}

/// Optimal value for a fixed Lipschitz budget, and the maximizing function
/// values when `with_argmax` is set.
pub(crate) fn value_at_budget(lip: f64, gaps: &[f64], c: &[f64], with_argmax: bool) -> (f64, Option<Vec<f64>>) {
    let k = c.len();
    let m = (1.0 - lip).max(0.0);
    let mut chain = Chain::new(m);
    let mut plateaus = Vec::with_capacity(if with_argmax { k } else { 0 });
    for i in 0..k {
        if i > 0 {
            chain.widen(lip * gaps[i - 1]);
        }
        chain.add_linear(c[i]);
        if with_argmax {
            plateaus.push((chain.a, chain.b));
        }
    }
    if !with_argmax {
        return (chain.vmax, None);
    }
    let mut f = vec![0.0; k];
    f[k - 1] = 0.0_f64.clamp(plateaus[k - 1].0, plateaus[k - 1].1);
    for i in (0..k - 1).rev() {
        let next = f[i + 1];
        let r = lip * gaps[i];
        let (a, b) = plateaus[i];
        f[i] = next.clamp(a, b).clamp(next - r, next + r).clamp(-m, m);
    }
    (chain.vmax, Some(f))
}

/// Maximizes over the Lipschitz budget. Returns `(value, L, f)`.
pub(crate) fn solve_line(xs: &[f64], c: &[f64]) -> (f64, f64, Vec<f64>) {
    debug_assert_eq!(xs.len(), c.len());
    let gaps: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let eval = |l: f64| value_at_budget(l, &gaps, c, false).0;

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let mut best = if f1 >= f2 { (f1, x1) } else { (f2, x2) };
    while hi - lo > 1e-12 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1);
            if f1 > best.0 {
                best = (f1, x1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2);
            if f2 > best.0 {
                best = (f2, x2);
            }
        }
    }
    let lip = best.1;
    let (_, f) = value_at_budget(lip, &gaps, c, true);
    let f = f.expect("argmax requested");
    let value = c.iter().zip(&f).map(|(ci, fi)| ci * fi).sum();
    (value, lip, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over a grid of f values for two points.
    fn two_point_grid(x: [f64; 2], c: [f64; 2], lip: f64) -> f64 {
        let m = 1.0 - lip;
        let steps = 2000;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            let f0 = -m + 2.0 * m * i as f64 / steps as f64;
            for j in 0..=steps {
                let f1 = -m + 2.0 * m * j as f64 / steps as f64;
                if (f0 - f1).abs() <= lip * (x[1] - x[0]) + 1e-12 {
                    best = best.max(c[0] * f0 + c[1] * f1);
                }
            }
        }
        best
    }

    #[test]
    fn fixed_budget_matches_grid() {
        for lip in [0.2, 0.5, 0.7] {
            let (v, f) = value_at_budget(lip, &[1.0], &[1.0, -1.0], true);
            let g = two_point_grid([0.0, 1.0], [1.0, -1.0], lip);
            assert!((v - g).abs() < 2e-3, "lip {lip}: {v} vs {g}");
            let f = f.unwrap();
            assert!((f[0] - f[1] - v).abs() < 1e-12);
        }
    }

    #[test]
    fn dirac_pair_closed_form() {
        for t in [0.1, 0.5, 1.0, 3.0] {
            let (v, _, _) = solve_line(&[0.0, t], &[1.0, -1.0]);
            assert!((v - 2.0 * t / (2.0 + t)).abs() < 1e-9, "t {t}: {v}");
        }
    }

    #[test]
    fn zero_coefficients_give_zero() {
        let (v, _, f) = solve_line(&[0.0, 0.3, 1.0], &[0.0, 0.0, 0.0]);
        assert_eq!(v, 0.0);
        assert!(f.iter().all(|x| x.abs() <= 1.0));
    }

    #[test]
    fn certificate_is_feasible() {
        let xs = [0.0, 0.1, 0.15, 0.6, 0.61, 0.9];
        let c = [0.2, -0.1, 0.05, -0.3, 0.25, -0.1];
        let (v, lip, f) = solve_line(&xs, &c);
        let m = 1.0 - lip;
        for i in 0..xs.len() {
            assert!(f[i].abs() <= m + 1e-12);
            for j in 0..xs.len() {
                assert!((f[i] - f[j]).abs() <= lip * (xs[i] - xs[j]).abs() + 1e-12);
            }
        }
        assert!(v > 0.0);
    }
}
