use super::space::MetricSpace;
use crate::{Error, Result};

/// The contamination metric `d_n` between two samples of equal length:
/// the smallest `eps` such that at most a fraction `eps` of coordinate
/// pairs are `eps` or more apart.
///
/// The infimum is attained at `0`, at one of the coordinate distances, or
/// at some `k/n`, so it is found exactly by scanning those candidates in
/// increasing order after one sort.
pub fn dn_distance<S: MetricSpace>(a: &[S::Point], b: &[S::Point], ground: &S) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "d_n needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::domain("d_n needs nonempty tuples"));
    }
    Ok(dn_distance_unchecked(a, b, ground))
}

pub(crate) fn dn_distance_unchecked<S: MetricSpace>(a: &[S::Point], b: &[S::Point], ground: &S) -> f64 {
    let dists: Vec<f64> = a.iter().zip(b).map(|(x, y)| ground.dist(x, y)).collect();
    dn_from_distances(dists)
}

/// `d_n` given the coordinate distances directly.
pub fn dn_from_distances(mut dists: Vec<f64>) -> f64 {
    let n = dists.len();
    if n == 0 {
        return 0.0;
    }
    dists.sort_by(f64::total_cmp);
    let nf = n as f64;

    let mut candidates: Vec<f64> = Vec::with_capacity(2 * n + 2);
    candidates.push(0.0);
    candidates.extend(dists.iter().copied());
    candidates.extend((0..=n).map(|k| k as f64 / nf));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // `dists[first_above..]` are the distances strictly greater than the candidate.
    let mut first_above = 0;
    for &c in &candidates {
        while first_above < n && dists[first_above] <= c {
            first_above += 1;
        }
        let count = (n - first_above) as f64;
        if count <= nf * c {
            return c;
        }
    }
    // unreachable: at c = 1 the count never exceeds n
    1.0
}
