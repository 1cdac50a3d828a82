//! Clique-finding on `G(n, 1/2)`: weight functions over query transcripts,
//! the bounds derived from them, and a greedy baseline.

mod bounds;
mod dyadic;
mod greedy;
mod transcript;
mod weights;

pub use bounds::{
    alpha_plus, clique_weight_bound, feasibility_row, infeasibility_check, FeasibilityRow,
    Infeasibility,
};
pub use dyadic::Dyadic;
pub use greedy::{greedy_clique, sample_transcript, TranscriptStrategy};
pub use transcript::QueryTranscript;
pub use weights::{
    final_weights, martingale_residuals, martingale_step_check, max_matching_known, weight_of_set,
    weight_sums, WeightPoint, WeightState, MAX_MATCHING_SET, MAX_WEIGHT_K, MAX_WEIGHT_N,
};

use crate::oracle::OracleError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliqueError {
    #[error("{what} of size {size} exceeds the limit {limit}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("invalid parameters: {0}")]
    InvalidParams(alloc::string::String),
    #[error("delta={0} is outside [2 - sqrt 2, 2]")]
    Domain(f64),
    #[error("no step after t={t} in a transcript of length {len}")]
    NoNextStep { t: usize, len: usize },
    #[error("pair ({u}, {v}) is not a pair of distinct vertices below {n}")]
    BadPair { u: usize, v: usize, n: usize },
    #[error("pair ({u}, {v}) was already revealed")]
    RepeatedPair { u: usize, v: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
