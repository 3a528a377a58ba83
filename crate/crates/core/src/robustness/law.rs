use rayon::prelude::*;

use crate::bootstrap::{bootstrap_law_of_estimator, BootstrapScheme};
use crate::estimators::Statistic;
use crate::measures::DiscreteMeasure;
use crate::processes::{generate, ProcessSpec};
use crate::rng::derive;
use crate::{Error, Result};

/// Inner laws are compressed to at most this many atoms.
pub const MAX_INNER_ATOMS: usize = 200;

/// Realizations of the bootstrap law `L_{P*_n}(S_n)` for independent paths,
/// kept in replicate order, plus the uniform measure over them.
#[derive(Debug, Clone)]
pub struct LawOfLaws {
    /// Inner law of replicate `k`, after binning.
    pub replicates: Vec<DiscreteMeasure<f64>>,
    /// Uniform empirical measure on the replicates; equal inner laws merge.
    pub measure: DiscreteMeasure<DiscreteMeasure<f64>>,
    /// Largest distance any inner mass moved during binning.
    pub binning_resolution: f64,
}

/// Seed of outer replicate `k` under master seed `seed`.
pub fn replicate_seed(seed: u64, k: usize) -> u64 {
    derive(seed, k as u64)
}

/// `outer_reps` paths of length `n`, each turned into a bootstrap law with
/// `inner_reps` resamples. Replicate `k` uses [`replicate_seed`]`(seed, k)`
/// for both the path and its resamples, so two arms run with the same seed
/// share all random numbers.
pub fn law_of_laws(
    spec: &ProcessSpec,
    scheme: &BootstrapScheme,
    estimator: &dyn Statistic,
    n: usize,
    outer_reps: usize,
    inner_reps: usize,
    seed: u64,
) -> Result<LawOfLaws> {
    if outer_reps == 0 {
        return Err(Error::domain("outer_reps must be at least 1"));
    }
    let seeds: Vec<u64> = (0..outer_reps).map(|k| replicate_seed(seed, k)).collect();
    law_of_laws_from_seeds(spec, scheme, estimator, n, inner_reps, &seeds)
}

/// [`law_of_laws`] with explicit replicate seeds.
pub fn law_of_laws_from_seeds(
    spec: &ProcessSpec,
    scheme: &BootstrapScheme,
    estimator: &dyn Statistic,
    n: usize,
    inner_reps: usize,
    seeds: &[u64],
) -> Result<LawOfLaws> {
    if seeds.is_empty() {
        return Err(Error::domain("no outer replicates requested"));
    }
    let binned: Vec<(DiscreteMeasure<f64>, f64)> = seeds
        .par_iter()
        .map(|&s| {
            let path = generate(spec, n, s)?;
            let law = bootstrap_law_of_estimator(&path, scheme, estimator, inner_reps, s)?;
            Ok(quantile_bin(&law, MAX_INNER_ATOMS))
        })
        .collect::<Result<_>>()?;
    let binning_resolution = binned.iter().fold(0.0_f64, |a, (_, r)| a.max(*r));
    let replicates: Vec<DiscreteMeasure<f64>> = binned.into_iter().map(|(m, _)| m).collect();
    let measure = DiscreteMeasure::uniform(replicates.clone())?;
    Ok(LawOfLaws {
        replicates,
        measure,
        binning_resolution,
    })
}

/// Compresses a law on the line to at most `max_atoms` atoms: atom `j`
/// (ascending) goes to bin `floor(u_j * max_atoms)` where `u_j` is the
/// cumulative mass at its midpoint, and each bin becomes one atom at its
/// barycentre. Returns the binned law and the largest distance moved.
pub fn quantile_bin(law: &DiscreteMeasure<f64>, max_atoms: usize) -> (DiscreteMeasure<f64>, f64) {
    if law.len() <= max_atoms || max_atoms == 0 {
        return (law.clone(), 0.0);
    }
    let mut mass = vec![0.0; max_atoms];
    let mut moment = vec![0.0; max_atoms];
    let mut range = vec![(f64::INFINITY, f64::NEG_INFINITY); max_atoms];
    let mut acc = 0.0;
    for (&x, w) in law.iter() {
        let bin = (((acc + 0.5 * w) * max_atoms as f64) as usize).min(max_atoms - 1);
        acc += w;
        mass[bin] += w;
        moment[bin] += w * x;
        range[bin] = (range[bin].0.min(x), range[bin].1.max(x));
    }
    let mut support = Vec::with_capacity(max_atoms);
    let mut weights = Vec::with_capacity(max_atoms);
    let mut moved = 0.0_f64;
    for b in 0..max_atoms {
        if mass[b] > 0.0 {
            let c = moment[b] / mass[b];
            moved = moved.max(c - range[b].0).max(range[b].1 - c);
            support.push(c);
            weights.push(mass[b]);
        }
    }
    let binned = DiscreteMeasure::from_masses(support, weights).expect("bins carry positive mass");
    (binned, moved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::EstimatorOperator;
    use crate::measures::{BoxSpace, Point};
    use crate::processes::{BaseLaw, ProcessKind};

    #[test]
    fn constant_process_gives_single_atom() {
        let spec = ProcessSpec::new(ProcessKind::Iid(BaseLaw::Constant { value: Point::scalar(0.3) }), BoxSpace::unit(1));
        let l = law_of_laws(&spec, &BootstrapScheme::efron(), &EstimatorOperator::Mean, 10, 4, 20, 1).unwrap();
        assert_eq!(l.measure.len(), 1);
        assert_eq!(l.measure.support()[0].support(), &[0.3]);
        assert_eq!(l.measure.weights(), &[1.0]);
    }

    #[test]
    fn forced_equal_seeds_merge() {
        let spec = ProcessSpec::iid_uniform(BoxSpace::unit(1));
        let l = law_of_laws_from_seeds(&spec, &BootstrapScheme::efron(), &EstimatorOperator::Mean, 20, 30, &[5, 5]).unwrap();
        assert_eq!(l.replicates.len(), 2);
        assert_eq!(l.measure.len(), 1);
    }

    #[test]
    fn binning_keeps_mass_and_mean() {
        let pts: Vec<f64> = (0..1000).map(|k| (k as f64 * 0.37).sin()).collect();
        let law = DiscreteMeasure::uniform(pts).unwrap();
        let (b, moved) = quantile_bin(&law, 200);
        assert!(b.len() <= 200);
        let mean = |m: &DiscreteMeasure<f64>| m.iter().map(|(x, w)| x * w).sum::<f64>();
        assert!((mean(&law) - mean(&b)).abs() < 1e-12);
        assert!(moved > 0.0 && moved < 0.1);
    }
}
