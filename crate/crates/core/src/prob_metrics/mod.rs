//! Bounded-Lipschitz and Prohorov distances between discrete measures.

mod bl;
mod dump;
mod line;
mod maxflow;
mod measure_space;
mod prohorov;
mod relations;

pub use bl::{
    bl_distance, bl_distance_with, bl_from_matrix, bl_on_line, union_support, BlCertificate, BlOptions, BlSolver,
    BL_MAX_SUPPORT, CERT_TOL,
};
pub use dump::{dump_instance, lp_dump, LpDump};
pub use measure_space::{measure_space, MeasureSpace};
pub use prohorov::{prohorov_distance, prohorov_from_matrix, prohorov_with_certificate, ProhorovCertificate, PROHOROV_TOL};
pub use relations::{metric_relations, MetricRelations, RELATION_TOL, SQRT_BOUND_REGIME};
