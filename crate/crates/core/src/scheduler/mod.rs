//! Feedback-driven task scheduling: balanced cells, butterfly balancers and
//! the fabric that feeds the pipelines.

mod butterfly;
mod cells;
mod fabric;

pub use butterfly::Butterfly;
pub use cells::{
    build_scode_dispatch, build_scode_merge, dispatch_decide, merge_decide, CellStats,
    DispatchCell, DispatchDecision, MergeCell, MergeDecision,
};
pub use fabric::SchedulerFabric;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::MemoryLayout;
use crate::walk::WalkTask;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchedulerError {
    #[error("butterfly size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("channel {channel} has no pipeline among {pipelines}")]
    ChannelOutOfRange { channel: usize, pipelines: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SchedulerStats {
    pub dispatch_decisions: u64,
    pub dispatch_blocks: u64,
    pub dispatch_repeats: u64,
    pub merge_decisions: u64,
    pub merge_repeats: u64,
    pub returned_merged: u64,
    pub new_merged: u64,
    pub per_pipeline_dispatch: Vec<u64>,
}

/// Per-pipeline FIFO depth that hides a feedback delay of `c` cycles at a
/// service rate of `mu` tasks per cycle: `1 + ceil(mu * c)`.
pub fn depth_formula(n: usize, mu: f64, c: usize) -> usize {
    let _ = n;
    1 + (mu * c as f64).ceil() as usize
}

/// Total buffering across `n` pipelines: `n + mu * c * n`.
pub fn total_depth(n: usize, mu: f64, c: usize) -> usize {
    n * depth_formula(n, mu, c)
}

/// Scheduler feedback delay for `n` pipelines: `4 log2 n`.
pub fn default_feedback_delay(n: usize) -> usize {
    4 * n.max(1).trailing_zeros() as usize
}

/// Pipeline that should execute the next memory access of `t`: the owner of
/// the column channel once a neighbor index is sampled, otherwise the owner
/// of the row channel holding `t.curr`. Pipeline `i` owns channel `i`.
pub fn route_task(
    t: &WalkTask,
    layout: &MemoryLayout,
    n_pipelines: usize,
) -> Result<usize, SchedulerError> {
    let channel = match (t.stage.entry, t.stage.sampled) {
        (Some(e), Some(j)) => layout.locate(&e, j as u64).channel,
        _ => layout.row_channel_of(t.curr),
    };
    if channel < n_pipelines {
        Ok(channel)
    } else {
        Err(SchedulerError::ChannelOutOfRange {
            channel,
            pipelines: n_pipelines,
        })
    }
}
