use serde::{Deserialize, Serialize};

use crate::measures::{BoxSpace, DiscreteMeasure, MetricSpace, Point};
use crate::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-9;

/// Law of a single observation for the independent kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum BaseLaw {
    /// Uniform on the whole ground box.
    Uniform,
    /// Uniform on the sub-box `[lo, hi]^d` of the ground.
    UniformOn { lo: f64, hi: f64 },
    Discrete { measure: DiscreteMeasure<Point> },
    Constant { value: Point },
}

/// Mean sequence `a_i` of normal observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum DriftSequence {
    /// `a_i = limit + scale / i`.
    Harmonic { scale: f64, #[serde(default)] limit: f64 },
    /// `a_i = limit + amplitude * ratio^i`, `|ratio| < 1`.
    Geometric { amplitude: f64, ratio: f64, #[serde(default)] limit: f64 },
    Constant { value: f64 },
}

impl DriftSequence {
    /// `a_i` for the 1-based index `i`.
    pub fn value(&self, i: usize) -> f64 {
        let i = i.max(1) as f64;
        match *self {
            DriftSequence::Harmonic { scale, limit } => limit + scale / i,
            DriftSequence::Geometric { amplitude, ratio, limit } => limit + amplitude * ratio.powf(i),
            DriftSequence::Constant { value } => value,
        }
    }

    pub fn limit(&self) -> f64 {
        match *self {
            DriftSequence::Harmonic { limit, .. } | DriftSequence::Geometric { limit, .. } => limit,
            DriftSequence::Constant { value } => value,
        }
    }

    /// A bound `c` with `|a_i| <= c` for all `i`.
    pub fn bound(&self) -> f64 {
        match *self {
            DriftSequence::Harmonic { scale, limit } => limit.abs() + scale.abs(),
            DriftSequence::Geometric { amplitude, ratio, limit } => limit.abs() + (amplitude * ratio).abs(),
            DriftSequence::Constant { value } => value.abs(),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = match *self {
            DriftSequence::Harmonic { scale, limit } => scale.is_finite() && limit.is_finite(),
            DriftSequence::Geometric { amplitude, ratio, limit } => {
                if !(ratio.abs() < 1.0) {
                    return Err(Error::domain("geometric drift needs |ratio| < 1"));
                }
                amplitude.is_finite() && limit.is_finite()
            }
            DriftSequence::Constant { value } => value.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::domain("drift parameters must be finite"))
        }
    }
}

/// Contamination level `eps_i` of the shrinking-neighbourhood process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ShrinkRate {
    /// `eps_i = min(1, eps0 / i)`.
    Harmonic { eps0: f64 },
    /// `eps_i = min(1, eps0 / i^power)`.
    Power { eps0: f64, power: f64 },
    /// `eps_i = eps` for every `i`; does not shrink.
    Constant { eps: f64 },
}

impl ShrinkRate {
    pub fn epsilon(&self, i: usize) -> f64 {
        let i = i.max(1) as f64;
        match *self {
            ShrinkRate::Harmonic { eps0 } => (eps0 / i).min(1.0),
            ShrinkRate::Power { eps0, power } => (eps0 / i.powf(power)).min(1.0),
            ShrinkRate::Constant { eps } => eps,
        }
    }

    pub fn shrinks(&self) -> bool {
        !matches!(self, ShrinkRate::Constant { .. })
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            ShrinkRate::Harmonic { eps0 } => eps0 > 0.0 && eps0.is_finite(),
            ShrinkRate::Power { eps0, power } => eps0 > 0.0 && eps0.is_finite() && power > 0.0,
            ShrinkRate::Constant { eps } => (0.0..=1.0).contains(&eps),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("invalid contamination rate parameters"))
        }
    }
}

/// Kind-specific parameters of a process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ProcessKind {
    Iid(BaseLaw),
    /// `Z_i ~ N(a_i, sd^2)` clipped to `window` and mapped affinely onto the
    /// ground interval.
    NormalDrift {
        drift: DriftSequence,
        #[serde(default = "one")]
        sd: f64,
        /// Clipping window; defaults to the ground interval.
        #[serde(default)]
        window: Option<[f64; 2]>,
    },
    /// `Z_i ~ (1 - eps_i) P + eps_i P~`.
    ShrinkingContamination {
        base: BaseLaw,
        contaminant: BaseLaw,
        rate: ShrinkRate,
    },
    /// Stationary finite-state chain emitting `states[k]` in state `k`.
    MarkovChain {
        transition: Vec<Vec<f64>>,
        #[serde(default)]
        states: Option<Vec<Point>>,
    },
    /// `X_{i+1} = phi X_i + eta_i` started stationary, observed through the
    /// normal CDF of `X_i / sd(X)`, so marginals are uniform on the ground.
    Ar1Transformed {
        phi: f64,
        #[serde(default = "one")]
        noise_sd: f64,
    },
}

fn one() -> f64 {
    1.0
}

/// How a contaminated path is derived from an ideal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContaminationMode {
    /// Exactly `floor(fraction * n)` uniformly chosen positions replaced.
    GrossError,
    /// Every coordinate moved by uniform noise of half-width `magnitude`.
    Rounding,
    /// Every position independently replaced with probability `fraction`.
    DistributionShift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    pub mode: ContaminationMode,
    #[serde(default)]
    pub fraction: f64,
    #[serde(default)]
    pub magnitude: f64,
    /// Replacement law; the upper corner of the ground box when absent.
    #[serde(default)]
    pub shift_target: Option<DiscreteMeasure<Point>>,
}

impl ContaminationSpec {
    pub fn gross_error(fraction: f64, target: Option<DiscreteMeasure<Point>>) -> Self {
        ContaminationSpec {
            mode: ContaminationMode::GrossError,
            fraction,
            magnitude: 0.0,
            shift_target: target,
        }
    }

    pub fn rounding(magnitude: f64) -> Self {
        ContaminationSpec {
            mode: ContaminationMode::Rounding,
            fraction: 1.0,
            magnitude,
            shift_target: None,
        }
    }

    pub fn validate(&self, ground: &BoxSpace) -> Result<()> {
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::domain(format!("contamination fraction {} not in [0, 1]", self.fraction)));
        }
        if !(self.magnitude >= 0.0) || !self.magnitude.is_finite() {
            return Err(Error::domain("contamination magnitude must be finite and nonnegative"));
        }
        if let Some(t) = &self.shift_target {
            if !t.support().iter().all(|p| ground.contains(p)) {
                return Err(Error::domain("shift target has atoms outside the ground box"));
            }
        }
        Ok(())
    }

    /// Replacement law for gross errors and shifts.
    pub fn target(&self, ground: &BoxSpace) -> DiscreteMeasure<Point> {
        self.shift_target
            .clone()
            .unwrap_or_else(|| DiscreteMeasure::dirac(ground.upper_corner()))
    }
}

/// Dependence class of a process; contamination must keep both arms of an
/// experiment in the same class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuralClass {
    Independent,
    Mixing,
}

/// A declarative data-generating process on a ground box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub kind: ProcessKind,
    pub ground: BoxSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contamination: Option<ContaminationSpec>,
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, ground: BoxSpace) -> Self {
        ProcessSpec {
            name: None,
            kind,
            ground,
            contamination: None,
        }
    }

    pub fn iid_uniform(ground: BoxSpace) -> Self {
        Self::new(ProcessKind::Iid(BaseLaw::Uniform), ground)
    }

    pub fn with_contamination(mut self, c: ContaminationSpec) -> Self {
        self.contamination = Some(c);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ProcessKind::Iid(_) => "iid",
            ProcessKind::NormalDrift { .. } => "normal_drift",
            ProcessKind::ShrinkingContamination { .. } => "shrinking_contamination",
            ProcessKind::MarkovChain { .. } => "markov_chain",
            ProcessKind::Ar1Transformed { .. } => "ar1_transformed",
        }
    }

    /// Identifier recorded in generated sample paths.
    pub fn origin(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind_name().to_string())
    }

    pub fn structural_class(&self) -> StructuralClass {
        match self.kind {
            ProcessKind::MarkovChain { .. } | ProcessKind::Ar1Transformed { .. } => StructuralClass::Mixing,
            _ => StructuralClass::Independent,
        }
    }

    /// Emission points of a Markov chain; evenly spaced on the ground
    /// interval unless given.
    pub fn chain_states(&self) -> Option<Vec<Point>> {
        let ProcessKind::MarkovChain { transition, states } = &self.kind else {
            return None;
        };
        Some(states.clone().unwrap_or_else(|| {
            let s = transition.len();
            let g = &self.ground;
            (0..s)
                .map(|k| {
                    let t = if s == 1 { 0.5 } else { k as f64 / (s - 1) as f64 };
                    Point::new(&vec![g.lo + t * (g.hi - g.lo); g.dim])
                })
                .collect()
        }))
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.ground;
        if !(g.lo < g.hi) || !g.lo.is_finite() || !g.hi.is_finite() || !(1..=3).contains(&g.dim) {
            return Err(Error::domain("ground must be a finite box [lo, hi]^d with d in 1..=3"));
        }
        let one_dim = |what: &str| {
            if g.dim == 1 {
                Ok(())
            } else {
                Err(Error::capability(format!("{what} is defined on one-dimensional ground only")))
            }
        };
        match &self.kind {
            ProcessKind::Iid(law) => validate_law(law, g)?,
            ProcessKind::NormalDrift { drift, sd, window } => {
                one_dim("normal_drift")?;
                drift.validate()?;
                if !(*sd > 0.0) || !sd.is_finite() {
                    return Err(Error::domain("normal_drift needs sd > 0"));
                }
                if let Some([lo, hi]) = window {
                    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                        return Err(Error::domain("normal_drift window needs lo < hi"));
                    }
                }
            }
            ProcessKind::ShrinkingContamination { base, contaminant, rate } => {
                validate_law(base, g)?;
                validate_law(contaminant, g)?;
                rate.validate()?;
            }
            ProcessKind::MarkovChain { transition, states } => {
                validate_stochastic(transition)?;
                if let Some(st) = states {
                    if st.len() != transition.len() {
                        return Err(Error::domain(format!(
                            "{} emission states for a {}-state chain",
                            st.len(),
                            transition.len()
                        )));
                    }
                    if !st.iter().all(|p| g.contains(p)) {
                        return Err(Error::domain("emission states must lie in the ground box"));
                    }
                }
                super::mixing::stationary_distribution(transition)?;
            }
            ProcessKind::Ar1Transformed { phi, noise_sd } => {
                one_dim("ar1_transformed")?;
                if !(phi.abs() < 1.0) {
                    return Err(Error::domain("ar1_transformed needs |phi| < 1"));
                }
                if !(*noise_sd > 0.0) || !noise_sd.is_finite() {
                    return Err(Error::domain("ar1_transformed needs noise_sd > 0"));
                }
            }
        }
        if let Some(c) = &self.contamination {
            c.validate(g)?;
        }
        Ok(())
    }
}

fn validate_law(law: &BaseLaw, g: &BoxSpace) -> Result<()> {
    match law {
        BaseLaw::Uniform => Ok(()),
        BaseLaw::UniformOn { lo, hi } => {
            if lo < hi && *lo >= g.lo && *hi <= g.hi {
                Ok(())
            } else {
                Err(Error::domain(format!("uniform_on [{lo}, {hi}] is not a sub-interval of the ground")))
            }
        }
        BaseLaw::Discrete { measure } => {
            if measure.support().iter().all(|p| g.contains(p)) {
                Ok(())
            } else {
                Err(Error::domain("discrete law has atoms outside the ground box"))
            }
        }
        BaseLaw::Constant { value } => {
            if g.contains(value) {
                Ok(())
            } else {
                Err(Error::domain(format!("constant {value:?} outside the ground box")))
            }
        }
    }
}

/// Checks that `p` is a square row-stochastic matrix.
pub fn validate_stochastic(p: &[Vec<f64>]) -> Result<()> {
    let s = p.len();
    if s == 0 {
        return Err(Error::domain("transition matrix is empty"));
    }
    for (i, row) in p.iter().enumerate() {
        if row.len() != s {
            return Err(Error::domain(format!("transition row {i} has {} entries, expected {s}", row.len())));
        }
        if row.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(format!("transition row {i} has a negative or non-finite entry")));
        }
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::domain(format!("transition row {i} sums to {total}")));
        }
    }
    Ok(())
}

/// Whether two processes may serve as the two arms of one experiment.
pub fn same_class(p: &ProcessSpec, q: &ProcessSpec) -> bool {
    p.structural_class() == q.structural_class() && p.ground == q.ground
}
