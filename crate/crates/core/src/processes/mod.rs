//! Data-generating processes: independent, drifting, shrinking-neighbourhood,
//! Markov and transformed AR(1), with contamination and mixing diagnostics.

mod generate;
mod laws;
mod mixing;
mod spec;
mod varadarajan;

pub use generate::{contaminate, generate, uniform_draw};
pub use laws::{
    discretize_clipped_normal, discretize_uniform, gross_error_count, limit_law, marginal_law, mixture_marginal,
    normal_cdf, Discretized, DEFAULT_RESOLUTION,
};
pub use mixing::{
    alpha_bound, exact_alpha_markov, matrix_power, mixing_diagnostics, stationary_distribution, two_state_alpha,
    weak_bi_mixing_average, AlphaBound, MixingDiagnostics, ALPHA_MAX_STATES,
};
pub use spec::{
    same_class, validate_stochastic, BaseLaw, ContaminationMode, ContaminationSpec, DriftSequence, ProcessKind,
    ProcessSpec, ShrinkRate, StructuralClass,
};
pub use varadarajan::{varadarajan_diagnostic, DecayRow};
