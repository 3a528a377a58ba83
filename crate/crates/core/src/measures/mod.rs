//! Finite discrete probability measures and the metric spaces they live on.

mod atom;
mod dn;
mod measure;
mod path;
mod space;

pub use atom::{Atom, Point, Tuple, ATOM_TOL, MAX_DIM};
pub use dn::{dn_distance, dn_from_distances};
pub use measure::{
    empirical_measure, empirical_of, mixture, product_measure, product_measure_with_limit,
    uniform_mixture, DiscreteMeasure, MASS_TOL, PRODUCT_MAX_FACTORS, PRODUCT_MAX_SUPPORT,
};
pub use path::SamplePath;
pub use space::{product_space_dn, BoxSpace, DnSpace, MetricSpace, ProductNorm, ProductSpace, RealLine};
