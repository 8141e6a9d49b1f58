//! Graph storage: CSR construction, ingestion, synthetic generation, and the
//! channelized memory layout used by the simulator.

mod alias;
mod csr;
pub mod fixtures;
mod io;
mod layout;
mod rmat;
mod rp_entry;

pub use alias::{build_alias_table, AliasRef, AliasTable};
pub use csr::{build_csr, CsrGraph, Edge, VertexId};
pub use io::{
    load_edge_list, load_types, read_csr_cache, read_edge_list_file, write_csr_cache,
    write_edge_list, EdgeList, CACHE_MAGIC, CACHE_VERSION,
};
pub use layout::{build_layout, BlockMode, MemoryLayout, NeighborLocation};
pub use rmat::{assign_weights, gen_rmat, scramble_vertices, RmatParams};
pub use rp_entry::{EntryWidth, RowPointerEntry, RpAux};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex id {vertex} out of range for {num_vertices} vertices")]
    VertexOutOfRange { vertex: u64, num_vertices: usize },
    #[error("edge {edge} has invalid weight {weight}")]
    InvalidWeight { edge: usize, weight: f64 },
    #[error("vertex {0} has neighbors but every weight is zero")]
    ZeroWeightList(VertexId),
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("expected {expected} vertex types, found {found}")]
    TypeCountMismatch { expected: usize, found: usize },
    #[error("alias table needs at least one positive weight")]
    AllZeroWeights,
    #[error("RMAT probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("row pointer field `{field}` value {value} exceeds {bits} bits")]
    FieldOverflow {
        field: &'static str,
        value: u64,
        bits: u32,
    },
    #[error("bad CSR cache: {0}")]
    BadCache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
