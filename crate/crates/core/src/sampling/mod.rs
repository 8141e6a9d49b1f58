//! Random-number streams, walk parameters and the per-hop samplers.

mod params;
pub mod rng;
mod samplers;

pub use params::{AlgoKind, AlgoParams};
pub use rng::{key_from_seed, rng_next, unit_f64, RngStream};
pub use samplers::{
    filter_metapath, node2vec_envelope, node2vec_trial, node2vec_weight, sample_alias,
    sample_node2vec_reject, sample_reservoir_weighted, sample_uniform, ReservoirState,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("cannot sample from an empty neighbor list")]
    ZeroDegree,
    #[error("every candidate has zero weight")]
    AllZeroWeights,
    #[error("graph has no vertex types")]
    MissingTypes,
    #[error("invalid walk parameters: {0}")]
    InvalidParams(String),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgo(String),
}
