use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An observed sample `(z_1, ..., z_n)` together with the process and seed
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath<T> {
    values: Vec<T>,
    origin: String,
    seed: u64,
}

impl<T> SamplePath<T> {
    pub fn new(values: Vec<T>, origin: impl Into<String>, seed: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("a sample path needs at least one value"));
        }
        Ok(SamplePath {
            values,
            origin: origin.into(),
            seed,
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same provenance, new values.
    pub fn with_values(&self, values: Vec<T>, origin: impl Into<String>, seed: u64) -> Result<Self> {
        SamplePath::new(values, origin, seed)
    }
}
