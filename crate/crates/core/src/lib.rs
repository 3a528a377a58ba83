//! Bounded-Lipschitz and Prohorov metrics on discrete measures, stochastic
//! process generators, Efron and moving-block bootstrap, and a nested Monte
//! Carlo engine that measures how much contamination of the data moves the
//! law of a bootstrap estimate.

pub mod bootstrap;
pub mod error;
pub mod estimators;
pub mod io;
pub mod lp;
pub mod measures;
pub mod prob_metrics;
pub mod processes;
pub mod rng;
pub mod robustness;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/processes.md")]
    mod processes {}
    #[doc = include_str!("../../../book/src/bootstrap.md")]
    mod bootstrap {}
    #[doc = include_str!("../../../book/src/estimators.md")]
    mod estimators {}
    #[doc = include_str!("../../../book/src/robustness.md")]
    mod robustness {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
