//! Walk queries, stateless per-hop tasks and path collection.

mod sink;
mod source;
mod step;
mod task;

pub use sink::{format_path_line, write_paths, PathSink};
pub use source::{CsrSource, NeighborSource};
pub use step::{draw, sample_step, StepOutcome, StopReason};
pub use task::{
    advance, make_task, should_terminate, termination, Query, StageData, Termination, WalkTask,
    TASK_WORDS,
};

use thiserror::Error;

use crate::sampling::SamplingError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("query {query_id} already has a vertex for hop {hop}")]
    DuplicateHop { query_id: u64, hop: u32 },
    #[error("query {query_id} finished with a gap before hop {missing_hop}")]
    IncompletePath { query_id: u64, missing_hop: u32 },
    #[error("query {query_id} starts at vertex {vertex}, outside {num_vertices} vertices")]
    StartOutOfRange {
        query_id: u64,
        vertex: u32,
        num_vertices: usize,
    },
    #[error("task word {0} does not decode")]
    BadEncoding(usize),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}
