//! Sampling from base laws and discrete stand-ins for continuous marginals.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erf;

use super::mixing::stationary_distribution;
use super::spec::{BaseLaw, ContaminationMode, ContaminationSpec, ProcessKind, ProcessSpec};
use crate::measures::{mixture, BoxSpace, DiscreteMeasure, Point};
use crate::Result;

/// Default number of cells used when a continuous law is discretized.
pub const DEFAULT_RESOLUTION: usize = 200;

const ROUNDING_NODES: usize = 8;

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Draws from a discrete measure by inverting its cumulative weights.
#[derive(Debug, Clone)]
pub(crate) struct DiscreteSampler {
    points: Vec<Point>,
    cumulative: Vec<f64>,
}

impl DiscreteSampler {
    pub fn new(m: &DiscreteMeasure<Point>) -> Self {
        let mut acc = 0.0;
        let cumulative = m
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        DiscreteSampler {
            points: m.support().to_vec(),
            cumulative,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let u: f64 = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.points[k.min(self.points.len() - 1)]
    }
}

/// Sampler for a [`BaseLaw`] on a given box.
#[derive(Debug, Clone)]
pub(crate) enum LawSampler {
    Uniform(BoxSpace),
    Discrete(DiscreteSampler),
    Constant(Point),
}

impl LawSampler {
    pub fn new(law: &BaseLaw, ground: &BoxSpace) -> Self {
        match law {
            BaseLaw::Uniform => LawSampler::Uniform(*ground),
            BaseLaw::UniformOn { lo, hi } => LawSampler::Uniform(BoxSpace::new(*lo, *hi, ground.dim)),
            BaseLaw::Discrete { measure } => LawSampler::Discrete(DiscreteSampler::new(measure)),
            BaseLaw::Constant { value } => LawSampler::Constant(*value),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            LawSampler::Uniform(g) => uniform_point(g, rng),
            LawSampler::Discrete(s) => s.sample(rng),
            LawSampler::Constant(p) => *p,
        }
    }
}

pub(crate) fn uniform_point<R: Rng + ?Sized>(g: &BoxSpace, rng: &mut R) -> Point {
    let mut c = [0.0; 3];
    for v in c.iter_mut().take(g.dim) {
        *v = g.lo + (g.hi - g.lo) * rng.random::<f64>();
    }
    Point::new(&c[..g.dim])
}

pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Affine map of the clipped value `x` from `window` onto the ground interval.
pub(crate) fn window_to_ground(x: f64, window: [f64; 2], g: &BoxSpace) -> f64 {
    let t = (x.clamp(window[0], window[1]) - window[0]) / (window[1] - window[0]);
    (g.lo + t * (g.hi - g.lo)).clamp(g.lo, g.hi)
}

/// A discrete stand-in for a law together with the largest distance any
/// unit of mass was moved to produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretized {
    pub measure: DiscreteMeasure<Point>,
    pub resolution: f64,
}

impl Discretized {
    fn exact(measure: DiscreteMeasure<Point>) -> Self {
        Discretized {
            measure,
            resolution: 0.0,
        }
    }
}

fn cells_per_axis(resolution: usize, dim: usize) -> usize {
    ((resolution as f64).powf(1.0 / dim as f64).round() as usize).max(1)
}

/// Uniform law on the box as equal masses at the centres of a regular grid.
pub fn discretize_uniform(g: &BoxSpace, resolution: usize) -> Discretized {
    let r = cells_per_axis(resolution, g.dim);
    let h = (g.hi - g.lo) / r as f64;
    let mut points = Vec::with_capacity(r.pow(g.dim as u32));
    let mut idx = vec![0usize; g.dim];
    loop {
        let c: Vec<f64> = idx.iter().map(|&k| g.lo + (k as f64 + 0.5) * h).collect();
        points.push(Point::new(&c));
        let mut axis = 0;
        while axis < g.dim {
            idx[axis] += 1;
            if idx[axis] < r {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
        if axis == g.dim {
            break;
        }
    }
    Discretized {
        measure: DiscreteMeasure::uniform(points).expect("grid is nonempty"),
        resolution: 0.5 * h * (g.dim as f64).sqrt(),
    }
}

/// `N(mean, sd^2)` clipped to `window` and mapped onto the ground interval:
/// interior cells carry their normal mass at the cell midpoint, the clipped
/// tails become atoms at the two ends.
pub fn discretize_clipped_normal(mean: f64, sd: f64, window: [f64; 2], g: &BoxSpace, resolution: usize) -> Discretized {
    let r = resolution.max(1);
    let h = (window[1] - window[0]) / r as f64;
    let cdf = |x: f64| normal_cdf((x - mean) / sd);
    let mut points = Vec::with_capacity(r + 2);
    let mut masses = Vec::with_capacity(r + 2);
    points.push(Point::scalar(g.lo));
    masses.push(cdf(window[0]));
    for k in 0..r {
        let a = window[0] + k as f64 * h;
        let b = a + h;
        points.push(Point::scalar(window_to_ground(a + 0.5 * h, window, g)));
        masses.push((cdf(b) - cdf(a)).max(0.0));
    }
    points.push(Point::scalar(g.hi));
    masses.push(1.0 - cdf(window[1]));
    let scale = (g.hi - g.lo) / (window[1] - window[0]);
    Discretized {
        measure: DiscreteMeasure::from_masses(points, masses).expect("normal masses are positive"),
        resolution: 0.5 * h * scale,
    }
}

fn base_law(law: &BaseLaw, g: &BoxSpace, resolution: usize) -> Discretized {
    match law {
        BaseLaw::Uniform => discretize_uniform(g, resolution),
        BaseLaw::UniformOn { lo, hi } => discretize_uniform(&BoxSpace::new(*lo, *hi, g.dim), resolution),
        BaseLaw::Discrete { measure } => Discretized::exact(measure.clone()),
        BaseLaw::Constant { value } => Discretized::exact(DiscreteMeasure::dirac(*value)),
    }
}

fn mix2(a: &Discretized, b: &Discretized, wb: f64) -> Result<Discretized> {
    if wb <= 0.0 {
        return Ok(a.clone());
    }
    if wb >= 1.0 {
        return Ok(b.clone());
    }
    Ok(Discretized {
        measure: mixture(&[a.measure.clone(), b.measure.clone()], &[1.0 - wb, wb])?,
        resolution: a.resolution.max(b.resolution),
    })
}

/// Law of the ideal (uncontaminated) observation `Z_i`, 1-based.
fn ideal_marginal(spec: &ProcessSpec, i: usize, resolution: usize) -> Result<Discretized> {
    let g = &spec.ground;
    Ok(match &spec.kind {
        ProcessKind::Iid(law) => base_law(law, g, resolution),
        ProcessKind::NormalDrift { drift, sd, window } => {
            let w = window.unwrap_or([g.lo, g.hi]);
            discretize_clipped_normal(drift.value(i), *sd, w, g, resolution)
        }
        ProcessKind::ShrinkingContamination {
            base,
            contaminant,
            rate,
        } => mix2(&base_law(base, g, resolution), &base_law(contaminant, g, resolution), rate.epsilon(i))?,
        ProcessKind::MarkovChain { transition, .. } => {
            let pi = stationary_distribution(transition)?;
            let states = spec.chain_states().expect("markov spec has states");
            Discretized::exact(DiscreteMeasure::from_masses(states, pi)?)
        }
        ProcessKind::Ar1Transformed { .. } => discretize_uniform(g, resolution),
    })
}

/// Applies the marginal effect of contamination to an observation law when
/// the path has length `n` (`None` for the large-`n` limit).
fn contaminate_law(
    law: Discretized,
    c: &ContaminationSpec,
    g: &BoxSpace,
    n: Option<usize>,
) -> Result<Discretized> {
    match c.mode {
        ContaminationMode::GrossError => {
            let share = match n {
                Some(n) => gross_error_count(c.fraction, n) as f64 / n as f64,
                None => c.fraction,
            };
            mix2(&law, &Discretized::exact(c.target(g)), share)
        }
        ContaminationMode::DistributionShift => mix2(&law, &Discretized::exact(c.target(g)), c.fraction),
        ContaminationMode::Rounding => {
            if c.magnitude == 0.0 {
                return Ok(law);
            }
            let m = ROUNDING_NODES;
            let offsets: Vec<f64> = (0..m)
                .map(|j| -c.magnitude + (2 * j + 1) as f64 * c.magnitude / m as f64)
                .collect();
            let combos = m.pow(g.dim as u32);
            let mut points = Vec::with_capacity(law.measure.len() * combos);
            let mut masses = Vec::with_capacity(law.measure.len() * combos);
            for (x, w) in law.measure.iter() {
                for code in 0..combos {
                    let mut rest = code;
                    let coords: Vec<f64> = x
                        .coords()
                        .iter()
                        .map(|v| {
                            let o = offsets[rest % m];
                            rest /= m;
                            (v + o).clamp(g.lo, g.hi)
                        })
                        .collect();
                    points.push(Point::new(&coords));
                    masses.push(w / combos as f64);
                }
            }
            Ok(Discretized {
                measure: DiscreteMeasure::from_masses(points, masses)?,
                resolution: law.resolution + c.magnitude / m as f64 * (g.dim as f64).sqrt(),
            })
        }
    }
}

/// Number of positions a gross-error contamination replaces in a path of
/// length `n`.
pub fn gross_error_count(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64) + 1e-9).floor() as usize
}

/// Law of the observed `Z_i` (1-based) in a path of length `n`, including
/// contamination.
pub fn marginal_law(spec: &ProcessSpec, i: usize, n: usize, resolution: usize) -> Result<Discretized> {
    spec.validate()?;
    let law = ideal_marginal(spec, i, resolution)?;
    match &spec.contamination {
        Some(c) => contaminate_law(law, c, &spec.ground, Some(n)),
        None => Ok(law),
    }
}

/// The mixture `(1/n) sum_i L(Z_i)` of the first `n` marginals.
pub fn mixture_marginal(spec: &ProcessSpec, n: usize, resolution: usize) -> Result<Discretized> {
    let stationary = matches!(
        spec.kind,
        ProcessKind::Iid(_) | ProcessKind::MarkovChain { .. } | ProcessKind::Ar1Transformed { .. }
    ) || matches!(&spec.kind, ProcessKind::NormalDrift { drift: super::DriftSequence::Constant { .. }, .. });
    if stationary {
        return marginal_law(spec, 1, n, resolution);
    }
    let laws: Vec<Discretized> = (1..=n)
        .map(|i| marginal_law(spec, i, n, resolution))
        .collect::<Result<_>>()?;
    let resolution = laws.iter().fold(0.0_f64, |a, d| a.max(d.resolution));
    let measures: Vec<DiscreteMeasure<Point>> = laws.into_iter().map(|d| d.measure).collect();
    Ok(Discretized {
        measure: crate::measures::uniform_mixture(&measures)?,
        resolution,
    })
}

/// Declared limit law of the empirical measures of the process.
pub fn limit_law(spec: &ProcessSpec, resolution: usize) -> Result<Discretized> {
    spec.validate()?;
    let g = &spec.ground;
    let law = match &spec.kind {
        ProcessKind::NormalDrift { drift, sd, window } => {
            let w = window.unwrap_or([g.lo, g.hi]);
            discretize_clipped_normal(drift.limit(), *sd, w, g, resolution)
        }
        ProcessKind::ShrinkingContamination {
            base,
            contaminant,
            rate,
        } => {
            let eps = if rate.shrinks() { 0.0 } else { rate.epsilon(1) };
            mix2(&base_law(base, g, resolution), &base_law(contaminant, g, resolution), eps)?
        }
        _ => ideal_marginal(spec, 1, resolution)?,
    };
    match &spec.contamination {
        Some(c) => contaminate_law(law, c, g, None),
        None => Ok(law),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_has_equal_masses() {
        let d = discretize_uniform(&BoxSpace::unit(1), 10);
        assert_eq!(d.measure.len(), 10);
        assert!((d.measure.support()[0].x() - 0.05).abs() < 1e-15);
        assert!((d.resolution - 0.05).abs() < 1e-15);
        let d2 = discretize_uniform(&BoxSpace::unit(2), 100);
        assert_eq!(d2.measure.len(), 100);
    }

    #[test]
    fn clipped_normal_masses_sum_to_one() {
        let g = BoxSpace::interval(-4.0, 4.0);
        let d = discretize_clipped_normal(0.5, 1.0, [-4.0, 4.0], &g, 80);
        let total: f64 = d.measure.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mean: f64 = d.measure.iter().map(|(p, w)| p.x() * w).sum();
        assert!((mean - 0.5).abs() < 1e-2);
    }

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.96) - 0.975).abs() < 1e-4);
    }

    #[test]
    fn gross_error_count_floors() {
        assert_eq!(gross_error_count(0.1, 100), 10);
        assert_eq!(gross_error_count(0.05, 200), 10);
        assert_eq!(gross_error_count(0.05, 30), 1);
        assert_eq!(gross_error_count(0.0, 30), 0);
    }
}
