//! Cycle-level simulation of the walk pipelines, scheduler and memory.

mod fifo;
mod memory;
mod run;
mod trace;

pub use fifo::FifoChannel;
pub use memory::{AsyncEngine, EngineStats, MemConfig, MemRequest, MemoryChannel, PROXY_LATENCY};
pub use run::simulate;
pub use trace::{attach_trace, TraceEvent, TraceLog};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VertexId;
use crate::sampling::{AlgoKind, AlgoParams, SamplingError};
use crate::scheduler::{default_feedback_delay, depth_formula, SchedulerError, SchedulerStats};
use crate::walk::WalkError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no progress for {idle} cycles (cycle {cycle}, {live} live walks)")]
    Deadlock { cycle: u64, idle: u64, live: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
}

/// Where the memory requests of each engine go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelMapping {
    /// Row requests go to the channel owning the vertex, column requests to
    /// the channel holding the neighbor; channels are shared by all engines.
    Partitioned,
    /// Every engine has a dedicated channel holding a full graph replica.
    Private,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_pipelines: usize,
    /// Per-pipeline scheduler output FIFO depth; `None` uses the depth formula.
    pub pipeline_fifo_depth: Option<usize>,
    /// Credit delay of the pipeline input FIFOs; `None` uses `4 log2 N`.
    pub feedback_delay: Option<usize>,
    pub internal_fifo_depth: usize,
    pub stage_fifo_depth: usize,
    pub retry_fifo_depth: usize,
    pub mem: MemConfig,
    pub mapping: ChannelMapping,
    /// Walks admitted at once; `None` allows `512 N`.
    pub max_live: Option<usize>,
    pub seed: u64,
    pub params: AlgoParams,
    /// Cycles excluded from bubble accounting; `None` uses
    /// `10 (fixed_latency + 4 log2 N)`.
    pub warmup: Option<u64>,
    pub trace_limit: usize,
    pub write_granularity: usize,
    pub watchdog_cycles: u64,
}

impl SimConfig {
    pub fn new(n_pipelines: usize, params: AlgoParams, seed: u64) -> Self {
        Self {
            n_pipelines,
            pipeline_fifo_depth: None,
            feedback_delay: None,
            internal_fifo_depth: 4,
            stage_fifo_depth: 4,
            retry_fifo_depth: 8,
            mem: MemConfig::default(),
            mapping: ChannelMapping::Partitioned,
            max_live: None,
            seed,
            params,
            warmup: None,
            trace_limit: 0,
            write_granularity: 16,
            watchdog_cycles: 100_000,
        }
    }

    pub fn feedback_delay(&self) -> usize {
        self.feedback_delay
            .unwrap_or_else(|| default_feedback_delay(self.n_pipelines))
    }

    pub fn pipeline_depth(&self) -> usize {
        self.pipeline_fifo_depth
            .unwrap_or_else(|| depth_formula(self.n_pipelines, 1.0, self.feedback_delay()))
    }

    pub fn max_live(&self) -> usize {
        self.max_live.unwrap_or(512 * self.n_pipelines)
    }

    pub fn warmup(&self) -> u64 {
        self.warmup.unwrap_or_else(|| {
            10 * (self.mem.fixed_latency + default_feedback_delay(self.n_pipelines) as u64)
        })
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Config(m.to_string()));
        if self.n_pipelines == 0 || !self.n_pipelines.is_power_of_two() {
            return bad("n_pipelines must be a power of two");
        }
        if self.pipeline_depth() == 0 || self.internal_fifo_depth == 0 {
            return bad("FIFO depths must be positive");
        }
        if self.stage_fifo_depth < 2 || self.retry_fifo_depth < 1 {
            return bad("stage FIFOs need at least 2 entries");
        }
        if self.mem.max_outstanding == 0 || self.mem.meta_queue == 0 || self.mem.txn_ids == 0 {
            return bad("memory engine caps must be positive");
        }
        if self.max_live() == 0 {
            return bad("max_live must be positive");
        }
        self.params.validate()?;
        Ok(())
    }
}

/// Per-pipeline counters for the three stages.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageCounts {
    pub ra: Vec<u64>,
    pub sp: Vec<u64>,
    pub ca: Vec<u64>,
}

impl StageCounts {
    pub fn new(n: usize) -> Self {
        Self {
            ra: vec![0; n],
            sp: vec![0; n],
            ca: vec![0; n],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub algo: AlgoKind,
    pub n_pipelines: usize,
    pub total_cycles: u64,
    pub completed_steps: u64,
    pub completed_queries: u64,
    pub stage_busy: StageCounts,
    pub stage_idle: StageCounts,
    /// Sampling-stage idle cycles while queries wait in the loader, after warmup.
    pub bubbles: Vec<u64>,
    pub warmup_cycles: u64,
    /// Post-warmup cycles with a nonempty loader.
    pub window_cycles: u64,
    pub channel_accesses: Vec<u64>,
    pub rp_entry_bytes: u64,
    pub sampling_retries: u64,
    pub scheduler: SchedulerStats,
}

impl SimReport {
    pub fn empty(algo: AlgoKind, n_pipelines: usize) -> Self {
        Self {
            algo,
            n_pipelines,
            total_cycles: 0,
            completed_steps: 0,
            completed_queries: 0,
            stage_busy: StageCounts::new(n_pipelines),
            stage_idle: StageCounts::new(n_pipelines),
            bubbles: vec![0; n_pipelines],
            warmup_cycles: 0,
            window_cycles: 0,
            channel_accesses: Vec::new(),
            rp_entry_bytes: 8,
            sampling_retries: 0,
            scheduler: SchedulerStats::default(),
        }
    }

    pub fn total_bubbles(&self) -> u64 {
        self.bubbles.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub paths: BTreeMap<u64, Vec<VertexId>>,
    pub report: SimReport,
    pub trace: TraceLog,
}
