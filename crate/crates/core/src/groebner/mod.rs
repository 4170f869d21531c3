//! Buchberger's algorithm and the ideal operations built on it: sum,
//! intersection, elimination, saturation, equality and renaming.

mod buchberger;
mod ideal;

pub use buchberger::GbStats;
pub use ideal::{
    eliminate, groebner_basis, ideal_equal, ideal_intersect, ideal_sum, normal_form, rename_vars, saturate, Ideal,
};

use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroebnerError {
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("renaming is not injective: {0} is hit twice")]
    Collision(String),
}

/// Caps for a single Groebner basis computation.
#[derive(Clone, Debug)]
pub struct GbConfig {
    pub max_pairs: usize,
    pub max_degree: u32,
    pub deadline: Option<Instant>,
}

impl Default for GbConfig {
    fn default() -> Self {
        GbConfig { max_pairs: 1_000_000, max_degree: 256, deadline: None }
    }
}
