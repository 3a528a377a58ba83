use rand::Rng;

use super::laws::{normal_cdf, standard_normal, uniform_point, window_to_ground, DiscreteSampler, LawSampler};
use super::mixing::stationary_distribution;
use super::spec::{ContaminationMode, ContaminationSpec, ProcessKind, ProcessSpec};
use crate::measures::{BoxSpace, DiscreteMeasure, Point, SamplePath};
use crate::rng::{stream, substream};
use crate::Result;

/// Draws a path of length `n`. Identical `(spec, n, seed)` give identical
/// paths; contamination, if declared, uses its own substream.
pub fn generate(spec: &ProcessSpec, n: usize, seed: u64) -> Result<SamplePath<Point>> {
    spec.validate()?;
    if n == 0 {
        return Err(crate::Error::domain("path length must be at least 1"));
    }
    let mut rng = substream(seed, stream::PATH);
    let g = &spec.ground;
    let values = match &spec.kind {
        ProcessKind::Iid(law) => {
            let s = LawSampler::new(law, g);
            (0..n).map(|_| s.sample(&mut rng)).collect()
        }
        ProcessKind::NormalDrift { drift, sd, window } => {
            let w = window.unwrap_or([g.lo, g.hi]);
            (1..=n)
                .map(|i| {
                    let x = drift.value(i) + sd * standard_normal(&mut rng);
                    Point::scalar(window_to_ground(x, w, g))
                })
                .collect()
        }
        ProcessKind::ShrinkingContamination {
            base,
            contaminant,
            rate,
        } => {
            let b = LawSampler::new(base, g);
            let c = LawSampler::new(contaminant, g);
            (1..=n)
                .map(|i| {
                    if rng.random::<f64>() < rate.epsilon(i) {
                        c.sample(&mut rng)
                    } else {
                        b.sample(&mut rng)
                    }
                })
                .collect()
        }
        ProcessKind::MarkovChain { transition, .. } => {
            let states = spec.chain_states().expect("markov spec has states");
            let pi = stationary_distribution(transition)?;
            let idx: Vec<Point> = (0..states.len()).map(|k| Point::scalar(k as f64)).collect();
            let start = DiscreteSampler::new(&DiscreteMeasure::from_masses(idx.clone(), pi)?);
            let rows: Vec<DiscreteSampler> = transition
                .iter()
                .map(|row| DiscreteMeasure::from_masses(idx.clone(), row.clone()).map(|m| DiscreteSampler::new(&m)))
                .collect::<Result<_>>()?;
            let mut k = start.sample(&mut rng).x() as usize;
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                out.push(states[k]);
                k = rows[k].sample(&mut rng).x() as usize;
            }
            out
        }
        ProcessKind::Ar1Transformed { phi, noise_sd } => {
            let sd_stat = noise_sd / (1.0 - phi * phi).sqrt();
            let mut x = sd_stat * standard_normal(&mut rng);
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let u = normal_cdf(x / sd_stat);
                out.push(Point::scalar((g.lo + u * (g.hi - g.lo)).clamp(g.lo, g.hi)));
                x = phi * x + noise_sd * standard_normal(&mut rng);
            }
            out
        }
    };
    let path = SamplePath::new(values, spec.origin(), seed)?;
    match &spec.contamination {
        Some(c) => contaminate(&path, c, g, seed),
        None => Ok(path),
    }
}

/// Applies a contamination to an existing path, deterministically in `seed`.
///
/// Only observed values change, so a contaminated chain keeps its
/// transition structure.
pub fn contaminate(
    path: &SamplePath<Point>,
    spec: &ContaminationSpec,
    ground: &BoxSpace,
    seed: u64,
) -> Result<SamplePath<Point>> {
    spec.validate(ground)?;
    let mut rng = substream(seed, stream::CONTAMINATION);
    let mut values = path.values().to_vec();
    let n = values.len();
    match spec.mode {
        ContaminationMode::GrossError => {
            let k = super::laws::gross_error_count(spec.fraction, n);
            let target = DiscreteSampler::new(&spec.target(ground));
            for i in rand::seq::index::sample(&mut rng, n, k).into_iter() {
                values[i] = target.sample(&mut rng);
            }
        }
        ContaminationMode::Rounding => {
            if spec.magnitude > 0.0 {
                for v in values.iter_mut() {
                    let c: Vec<f64> = v
                        .coords()
                        .iter()
                        .map(|x| (x + rng.random_range(-spec.magnitude..=spec.magnitude)).clamp(ground.lo, ground.hi))
                        .collect();
                    *v = Point::new(&c);
                }
            }
        }
        ContaminationMode::DistributionShift => {
            let target = DiscreteSampler::new(&spec.target(ground));
            for v in values.iter_mut() {
                if rng.random::<f64>() < spec.fraction {
                    *v = target.sample(&mut rng);
                }
            }
        }
    }
    let origin = format!("{}+{:?}", path.origin(), spec.mode).to_lowercase();
    path.with_values(values, origin, path.seed())
}

/// A uniform point of the ground box; exposed for probes and tests.
pub fn uniform_draw<R: Rng + ?Sized>(ground: &BoxSpace, rng: &mut R) -> Point {
    uniform_point(ground, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::{BaseLaw, DriftSequence};

    #[test]
    fn iid_uniform_is_reproducible_and_in_range() {
        let spec = ProcessSpec::iid_uniform(BoxSpace::unit(1));
        let a = generate(&spec, 4, 42).unwrap();
        let b = generate(&spec, 4, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.values().iter().all(|p| (0.0..=1.0).contains(&p.x())));
        assert_ne!(a, generate(&spec, 4, 43).unwrap());
    }

    #[test]
    fn normal_drift_mean_tends_to_limit() {
        let spec = ProcessSpec::new(
            ProcessKind::NormalDrift {
                drift: DriftSequence::Harmonic { scale: 1.0, limit: 0.0 },
                sd: 1.0,
                window: None,
            },
            BoxSpace::interval(-4.0, 4.0),
        );
        let path = generate(&spec, 10_000, 5).unwrap();
        let mean: f64 = path.values().iter().map(|p| p.x()).sum::<f64>() / 10_000.0;
        // 3 sigma / sqrt(n) = 0.03 plus the harmonic drift contribution
        assert!(mean.abs() < 0.05, "{mean}");
    }

    #[test]
    fn symmetric_chain_visits_states_equally() {
        let spec = ProcessSpec::new(
            ProcessKind::MarkovChain {
                transition: vec![vec![0.9, 0.1], vec![0.1, 0.9]],
                states: None,
            },
            BoxSpace::unit(1),
        );
        let path = generate(&spec, 10_000, 17).unwrap();
        let ones = path.values().iter().filter(|p| p.x() == 1.0).count() as f64 / 10_000.0;
        assert!((ones - 0.5).abs() < 0.05, "{ones}");
    }

    #[test]
    fn ar1_output_is_in_unit_interval() {
        let spec = ProcessSpec::new(ProcessKind::Ar1Transformed { phi: 0.6, noise_sd: 1.0 }, BoxSpace::unit(1));
        let path = generate(&spec, 2000, 3).unwrap();
        assert!(path.values().iter().all(|p| (0.0..=1.0).contains(&p.x())));
        let mean: f64 = path.values().iter().map(|p| p.x()).sum::<f64>() / 2000.0;
        assert!((mean - 0.5).abs() < 0.05);
    }

    #[test]
    fn gross_error_replaces_exact_count() {
        let g = BoxSpace::unit(1);
        let path = generate(&ProcessSpec::iid_uniform(g), 100, 9).unwrap();
        let c = ContaminationSpec::gross_error(0.1, None);
        let out = contaminate(&path, &c, &g, 9).unwrap();
        let changed = path.values().iter().zip(out.values()).filter(|(a, b)| a != b).count();
        assert_eq!(changed, 10);
        let none = contaminate(&path, &ContaminationSpec::gross_error(0.0, None), &g, 9).unwrap();
        assert_eq!(none.values(), path.values());
        let all = ContaminationSpec::gross_error(1.0, Some(DiscreteMeasure::dirac(Point::scalar(1.0))));
        let out = contaminate(&path, &all, &g, 9).unwrap();
        assert!(out.values().iter().all(|p| p.x() == 1.0));
    }

    #[test]
    fn rounding_stays_within_magnitude() {
        let g = BoxSpace::unit(1);
        let path = generate(&ProcessSpec::iid_uniform(g), 200, 1).unwrap();
        let out = contaminate(&path, &ContaminationSpec::rounding(0.01), &g, 1).unwrap();
        for (a, b) in path.values().iter().zip(out.values()) {
            assert!((a.x() - b.x()).abs() <= 0.01 + 1e-15);
            assert!((0.0..=1.0).contains(&b.x()));
        }
    }

    #[test]
    fn invalid_chain_is_rejected() {
        let spec = ProcessSpec::new(
            ProcessKind::MarkovChain {
                transition: vec![vec![0.5, 0.6], vec![0.1, 0.9]],
                states: None,
            },
            BoxSpace::unit(1),
        );
        assert!(generate(&spec, 5, 1).is_err());
        let spec = ProcessSpec::new(ProcessKind::Iid(BaseLaw::Constant { value: Point::scalar(2.0) }), BoxSpace::unit(1));
        assert!(generate(&spec, 5, 1).is_err());
    }
}
