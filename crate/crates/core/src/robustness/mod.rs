//! Nested Monte Carlo comparison of bootstrap laws under two data-generating
//! processes: the law of laws `L(L_{P*_n}(S_n))` against `L(L_{Q*_n}(S_n))`.

mod config;
mod distance;
mod experiment;
mod input;
mod law;

pub use config::{ExperimentConfig, Method, DEFAULT_INNER_REPS, DEFAULT_OUTER_REPS};
pub use distance::{
    coupled_expectation, nested_bl_distance, paired_estimate, PairedEstimate, MAX_OUTER_ATOMS, MC_RESAMPLES, MC_Z,
};
pub use experiment::{
    parse_summary_csv, run_experiment, run_experiment_with, NRecord, RobustnessReport, SummaryRow, SUMMARY_HEADER,
};
pub use input::{input_distance_proxy, input_distance_with, joint_law, InputDistance, JOINT_MAX_ATOMS, JOINT_MAX_N};
pub use law::{law_of_laws, law_of_laws_from_seeds, quantile_bin, replicate_seed, LawOfLaws, MAX_INNER_ATOMS};
