//! Exact alpha-mixing coefficients of small stationary Markov chains.

use serde::{Deserialize, Serialize};

use super::spec::{validate_stochastic, ProcessKind, ProcessSpec};
use crate::{Error, Result};

/// Largest state space for which events are enumerated.
pub const ALPHA_MAX_STATES: usize = 3;

const SINGULAR_TOL: f64 = 1e-12;

/// Stationary distribution `pi P = pi` of an irreducible chain, by Gaussian
/// elimination on `(P^T - I)` with one equation replaced by `sum pi = 1`.
pub fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    validate_stochastic(p)?;
    let s = p.len();
    let mut a: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            let mut row: Vec<f64> = (0..s).map(|j| p[j][i] - if i == j { 1.0 } else { 0.0 }).collect();
            row.push(0.0);
            row
        })
        .collect();
    a[s - 1] = vec![1.0; s + 1];
    for col in 0..s {
        let piv = (col..s)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty range");
        if a[piv][col].abs() < SINGULAR_TOL {
            return Err(Error::domain("transition matrix has no unique stationary distribution"));
        }
        a.swap(col, piv);
        for r in 0..s {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=s {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    let pi: Vec<f64> = (0..s).map(|i| (a[i][s] / a[i][i]).max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    Ok(pi.into_iter().map(|x| x / total).collect())
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let s = a.len();
    (0..s)
        .map(|i| (0..s).map(|j| (0..s).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// `P^k` by repeated squaring; `P^0` is the identity.
pub fn matrix_power(p: &[Vec<f64>], mut k: usize) -> Vec<Vec<f64>> {
    let s = p.len();
    let mut result: Vec<Vec<f64>> = (0..s).map(|i| (0..s).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let mut base = p.to_vec();
    while k > 0 {
        if k & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        base = mat_mul(&base, &base);
        k >>= 1;
    }
    result
}

/// `sup |P(X_0 in A, X_lag in B) - P(A) P(B)|` over all pairs of state sets
/// for the chain started in its stationary law. `lag = 0` compares a state
/// with itself.
pub fn exact_alpha_markov(p: &[Vec<f64>], lag: usize) -> Result<f64> {
    let pi = stationary_distribution(p)?;
    let s = p.len();
    if s > ALPHA_MAX_STATES {
        return Err(Error::Capacity {
            what: "states for exact alpha",
            actual: s,
            limit: ALPHA_MAX_STATES,
        });
    }
    let pk = matrix_power(p, lag);
    let mut best = 0.0_f64;
    for a in 0u32..(1 << s) {
        let pa: f64 = (0..s).filter(|i| a >> i & 1 == 1).map(|i| pi[i]).sum();
        for b in 0u32..(1 << s) {
            let pb: f64 = (0..s).filter(|j| b >> j & 1 == 1).map(|j| pi[j]).sum();
            let mut joint = 0.0;
            for i in (0..s).filter(|i| a >> i & 1 == 1) {
                for j in (0..s).filter(|j| b >> j & 1 == 1) {
                    joint += pi[i] * pk[i][j];
                }
            }
            best = best.max((joint - pa * pb).abs());
        }
    }
    Ok(best)
}

/// Closed form for a two-state chain with switch probabilities `p` (from
/// state 0) and `q` (from state 1).
pub fn two_state_alpha(p: f64, q: f64, lag: usize) -> f64 {
    let pi0 = q / (p + q);
    let pi1 = p / (p + q);
    pi0 * pi1 * (1.0 - p - q).abs().powi(lag as i32)
}

fn chain_of(spec: &ProcessSpec) -> Result<&[Vec<f64>]> {
    match &spec.kind {
        ProcessKind::MarkovChain { transition, .. } => Ok(transition),
        _ => Err(Error::capability(format!(
            "exact mixing coefficients need a markov_chain process, got {}",
            spec.kind_name()
        ))),
    }
}

/// `(1/n^2) sum_{i,j=1..n} alpha(sigma(Z_i), sigma(Z_j))`, using that the
/// coefficient depends on `|i - j|` only. The diagonal terms are included,
/// so even an independent chain gives `alpha(0) / n`.
pub fn weak_bi_mixing_average(spec: &ProcessSpec, n: usize) -> Result<f64> {
    let p = chain_of(spec)?;
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let alphas: Vec<f64> = (0..n).map(|k| exact_alpha_markov(p, k)).collect::<Result<_>>()?;
    Ok(bi_mixing_from_alphas(&alphas, n))
}

fn bi_mixing_from_alphas(alphas: &[f64], n: usize) -> f64 {
    let nf = n as f64;
    let off: f64 = (1..n).map(|k| 2.0 * (n - k) as f64 * alphas[k]).sum();
    (nf * alphas[0] + off) / (nf * nf)
}

/// Known bound on mixing coefficients where exact values are out of reach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum AlphaBound {
    /// `alpha(m) <= C rate^m` for some constant `C`.
    Geometric { rate: f64 },
    /// Coefficients are computed exactly.
    Exact,
    /// Independent observations: all coefficients between distinct indices vanish.
    Independent,
}

pub fn alpha_bound(spec: &ProcessSpec) -> AlphaBound {
    match &spec.kind {
        ProcessKind::Ar1Transformed { phi, .. } => AlphaBound::Geometric { rate: phi.abs() },
        ProcessKind::MarkovChain { .. } => AlphaBound::Exact,
        _ => AlphaBound::Independent,
    }
}

/// Exact coefficients, bi-mixing averages and a power-law fit of the tail
/// sums `sum_{m > n} alpha(m) ~ C n^{-gamma}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingDiagnostics {
    /// `alpha(m)` for `m = 1..=max_lag`.
    pub alpha_coeffs: Vec<f64>,
    /// `(n, average)` for each requested `n`.
    pub weak_bi_mixing_averages: Vec<(usize, f64)>,
    /// `(n, sum_{n < m <= max_lag} alpha(m))`.
    pub tail_sums: Vec<(usize, f64)>,
    pub fit_constant: Option<f64>,
    pub fit_gamma: Option<f64>,
}

pub fn mixing_diagnostics(spec: &ProcessSpec, max_lag: usize, n_grid: &[usize]) -> Result<MixingDiagnostics> {
    let p = chain_of(spec)?;
    let horizon = max_lag.max(n_grid.iter().copied().max().unwrap_or(1));
    let alphas: Vec<f64> = (0..=horizon).map(|k| exact_alpha_markov(p, k)).collect::<Result<_>>()?;
    let weak = n_grid
        .iter()
        .map(|&n| (n, bi_mixing_from_alphas(&alphas[..n.max(1)], n.max(1))))
        .collect();
    let mut tail_sums = Vec::with_capacity(max_lag);
    let mut acc = 0.0;
    for m in (2..=max_lag).rev() {
        acc += alphas[m];
        tail_sums.push((m - 1, acc));
    }
    tail_sums.reverse();
    let pts: Vec<(f64, f64)> = tail_sums
        .iter()
        .filter(|(_, t)| *t > 1e-300)
        .map(|&(n, t)| ((n as f64).ln(), t.ln()))
        .collect();
    let (fit_constant, fit_gamma) = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        (Some((my - slope * mx).exp()), Some(-slope))
    } else {
        (None, None)
    };
    Ok(MixingDiagnostics {
        alpha_coeffs: alphas[1..=max_lag].to_vec(),
        weak_bi_mixing_averages: weak,
        tail_sums,
        fit_constant,
        fit_gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::BoxSpace;

    fn two_state(p: f64, q: f64) -> Vec<Vec<f64>> {
        vec![vec![1.0 - p, p], vec![q, 1.0 - q]]
    }

    #[test]
    fn stationary_of_two_state() {
        let pi = stationary_distribution(&two_state(0.2, 0.6)).unwrap();
        assert!((pi[0] - 0.75).abs() < 1e-14 && (pi[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn reducible_chain_is_rejected() {
        let p = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(stationary_distribution(&p).is_err());
    }

    #[test]
    fn closed_form_example() {
        let a = exact_alpha_markov(&two_state(0.3, 0.3), 1).unwrap();
        assert!((a - 0.1).abs() < 1e-12);
        assert!((two_state_alpha(0.3, 0.3, 1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn identical_rows_are_independent() {
        let p = vec![vec![0.2, 0.5, 0.3]; 3];
        for lag in 1..5 {
            assert!(exact_alpha_markov(&p, lag).unwrap() < 1e-15);
        }
    }

    #[test]
    fn bi_mixing_decreases_for_mixing_chain() {
        let spec = ProcessSpec::new(
            ProcessKind::MarkovChain {
                transition: two_state(0.2, 0.3),
                states: None,
            },
            BoxSpace::unit(1),
        );
        let a10 = weak_bi_mixing_average(&spec, 10).unwrap();
        let a100 = weak_bi_mixing_average(&spec, 100).unwrap();
        assert!(a100 < a10 && a100 >= 0.0);
    }

    #[test]
    fn independent_chain_keeps_only_the_diagonal() {
        let spec = ProcessSpec::new(
            ProcessKind::MarkovChain {
                transition: vec![vec![0.5, 0.5]; 2],
                states: None,
            },
            BoxSpace::unit(1),
        );
        let v = weak_bi_mixing_average(&spec, 40).unwrap();
        assert!((v - 0.25 / 40.0).abs() < 1e-15);
    }

    #[test]
    fn non_chain_is_a_capability_error() {
        let spec = ProcessSpec::iid_uniform(BoxSpace::unit(1));
        assert!(matches!(weak_bi_mixing_average(&spec, 5), Err(Error::Capability(_))));
    }

    #[test]
    fn diagnostics_fit_is_finite() {
        let spec = ProcessSpec::new(
            ProcessKind::MarkovChain {
                transition: two_state(0.1, 0.2),
                states: None,
            },
            BoxSpace::unit(1),
        );
        let d = mixing_diagnostics(&spec, 30, &[10, 100]).unwrap();
        assert_eq!(d.alpha_coeffs.len(), 30);
        assert!(d.alpha_coeffs.iter().all(|a| (0.0..=0.25).contains(a)));
        assert!(d.fit_gamma.unwrap() > 0.0);
    }
}
