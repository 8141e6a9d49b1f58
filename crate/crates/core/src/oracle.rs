//! Ground truth: one-walk-at-a-time execution, exact next-hop distributions by
//! enumeration, and bulk-synchronous cost models for ablations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BlockMode, CsrGraph, MemoryLayout, VertexId};
use crate::sampling::{key_from_seed, AlgoKind, AlgoParams, SamplingError};
use crate::sim::{ChannelMapping, SimConfig, SimReport, PROXY_LATENCY};
use crate::walk::{advance, make_task, sample_step, CsrSource, NeighborSource, Query, StepOutcome, WalkError};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("vertex {0} has no candidate neighbors")]
    DeadEnd(VertexId),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("graph has no vertex types")]
    MissingTypes,
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

pub type Paths = BTreeMap<u64, Vec<VertexId>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub params: AlgoParams,
    pub seed: u64,
    pub walks: usize,
}

impl OracleConfig {
    pub fn new(params: AlgoParams, seed: u64, walks: usize) -> Self {
        Self { params, seed, walks }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        self.params.validate()?;
        Ok(())
    }
}

/// Walks every query to completion, one at a time.
pub fn walk_all<S: NeighborSource>(
    src: &S,
    queries: &[Query],
    params: &AlgoParams,
    seed: u64,
) -> Result<Paths, OracleError> {
    params.validate()?;
    let key = key_from_seed(seed);
    let mut paths = BTreeMap::new();
    for q in queries {
        q.validate(src.num_vertices())?;
        let mut path = vec![q.v_start];
        let mut t = make_task(q);
        loop {
            match sample_step(src, src.handle(t.curr), &t, params, key)? {
                StepOutcome::Stop(_) => break,
                StepOutcome::Retry => t.stage.retries += 1,
                StepOutcome::Sampled { index, last } => {
                    let next = src.neighbor(src.handle(t.curr), index);
                    path.push(next);
                    t = advance(&t, next, params);
                    if last {
                        break;
                    }
                }
            }
        }
        paths.insert(q.query_id, path);
    }
    Ok(paths)
}

pub fn run_sequential(g: &CsrGraph, queries: &[Query], cfg: &OracleConfig) -> Result<Paths, OracleError> {
    cfg.validate()?;
    walk_all(&CsrSource::new(g, cfg.params.kind), queries, &cfg.params, cfg.seed)
}

/// Exact next-hop distribution over `curr`'s neighbor list, in list order.
///
/// `prev` is `None` on the first hop; second-order walks then have no bias.
/// MetaPath walks use schema position 0; see [`transition_distribution_at`].
pub fn transition_distribution(
    g: &CsrGraph,
    curr: VertexId,
    prev: Option<VertexId>,
    params: &AlgoParams,
) -> Result<Vec<f64>, OracleError> {
    transition_distribution_at(g, curr, prev, params, 0)
}

/// As [`transition_distribution`], with the walk's current schema position.
pub fn transition_distribution_at(
    g: &CsrGraph,
    curr: VertexId,
    prev: Option<VertexId>,
    params: &AlgoParams,
    position: usize,
) -> Result<Vec<f64>, OracleError> {
    if curr as usize >= g.num_vertices() {
        return Err(OracleError::VertexOutOfRange(curr));
    }
    let nbrs = g.neighbors(curr);
    let edge_w = |j: usize| g.neighbor_weights(curr).map_or(1.0, |w| w[j]);
    let bias = |x: VertexId| match prev {
        None => 1.0,
        Some(u) if x == u => 1.0 / params.p,
        Some(u) if g.neighbors(u).contains(&x) => 1.0,
        Some(_) => 1.0 / params.q,
    };
    let raw: Vec<f64> = match params.kind {
        AlgoKind::Urw | AlgoKind::Ppr => vec![1.0; nbrs.len()],
        AlgoKind::DeepWalk => (0..nbrs.len()).map(edge_w).collect(),
        AlgoKind::Node2VecReject => nbrs.iter().map(|&x| bias(x)).collect(),
        AlgoKind::Node2VecReservoir => (0..nbrs.len()).map(|j| edge_w(j) * bias(nbrs[j])).collect(),
        AlgoKind::MetaPath => {
            let types = g.vertex_types().ok_or(OracleError::MissingTypes)?;
            let want = params.schema[(position + 1) % params.schema.len()];
            (0..nbrs.len())
                .map(|j| if types[nbrs[j] as usize] == want { edge_w(j) } else { 0.0 })
                .collect()
        }
    };
    let total: f64 = raw.iter().sum();
    if raw.is_empty() || total <= 0.0 {
        return Err(OracleError::DeadEnd(curr));
    }
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Timing of the bulk-synchronous ablation modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StaticMode {
    /// Each slot's hop waits out both memory round trips before the next slot starts.
    Serial,
    /// Memory requests of one round overlap; a round costs issuing every
    /// slot plus draining one hop's latency before the barrier.
    Overlapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchCost {
    /// Walks bound to one pipeline per batch.
    pub batch: usize,
    /// Cycles one memory access takes to come back.
    pub latency: u64,
    /// Non-memory cycles per hop.
    pub stage_cycles: u64,
}

impl BatchCost {
    pub fn for_config(cfg: &SimConfig) -> Self {
        Self {
            batch: 256,
            latency: cfg.mem.fixed_latency + PROXY_LATENCY,
            stage_cycles: 3,
        }
    }

    pub fn hop_cycles(&self) -> u64 {
        2 * self.latency + self.stage_cycles
    }

    pub fn round_cycles(&self, mode: StaticMode) -> u64 {
        match mode {
            StaticMode::Serial => self.batch as u64 * self.hop_cycles(),
            StaticMode::Overlapped => self.batch as u64 + self.hop_cycles(),
        }
    }
}

/// Queries bound statically to pipelines and run in lockstep batches.
///
/// Query `i` goes to pipeline `i mod N`. A batch holds `cost.batch` walks per
/// pipeline and lasts as many rounds as its longest walk needs; slots whose
/// walk has finished sit idle until the batch ends. In a round every live walk
/// makes one hop. Serial rounds cost `live * hop_cycles` on the busiest
/// pipeline. Overlapped rounds cost the larger of the busiest pipeline's
/// issue count and the busiest memory channel's access count, plus one hop's
/// latency to drain before the barrier. Paths are the same as the sequential executor's for the same seed.
pub fn static_batch_run(
    cfg: &SimConfig,
    layout: &MemoryLayout,
    queries: &[Query],
    mode: StaticMode,
    cost: BatchCost,
) -> Result<(Paths, SimReport), OracleError> {
    cfg.validate().map_err(|e| OracleError::Config(e.to_string()))?;
    if cost.batch == 0 {
        return Err(OracleError::Config("batch size must be positive".into()));
    }
    let n = cfg.n_pipelines;
    let n_row = layout.n_row_channels();
    if cfg.mapping == ChannelMapping::Partitioned && (n_row != n || layout.n_col_channels() != n) {
        return Err(OracleError::Config(format!(
            "partitioned mapping needs {n} row and {n} column channels"
        )));
    }
    let paths = walk_all(layout, queries, &cfg.params, cfg.seed)?;
    let mut report = SimReport::empty(cfg.params.kind, n);
    report.rp_entry_bytes = layout.entry_width().bytes();
    report.channel_accesses = vec![0; 2 * n];

    let channels_of = |p: usize, curr: VertexId, next: VertexId| match cfg.mapping {
        ChannelMapping::Private => (p, n + p),
        ChannelMapping::Partitioned => {
            let e = layout.entry(curr);
            let j = match layout.block_mode() {
                BlockMode::WholeList => 0,
                BlockMode::Edges(_) => (0..e.degree as u64)
                    .find(|&j| layout.neighbor(e, j) == next)
                    .unwrap_or(0),
            };
            (layout.row_channel_of(curr), n_row + layout.locate(e, j).channel)
        }
    };

    let per_batch = n * cost.batch;
    let mut live = vec![0u64; n];
    let mut load = vec![0u64; 2 * n];
    for chunk in queries.chunks(per_batch) {
        let walks: Vec<(usize, &Vec<VertexId>)> = chunk
            .iter()
            .enumerate()
            .map(|(k, q)| (k % n, &paths[&q.query_id]))
            .collect();
        let rounds = walks.iter().map(|(_, w)| w.len() - 1).max().unwrap_or(0);
        for r in 0..rounds {
            live.iter_mut().for_each(|x| *x = 0);
            load.iter_mut().for_each(|x| *x = 0);
            for &(p, w) in &walks {
                if w.len() - 1 > r {
                    live[p] += 1;
                    let (ra, ca) = channels_of(p, w[r], w[r + 1]);
                    load[ra] += 1;
                    load[ca] += 1;
                }
            }
            let busiest = *live.iter().max().unwrap_or(&0);
            let (round, per_hop) = match mode {
                StaticMode::Serial => (busiest * cost.hop_cycles(), cost.hop_cycles()),
                StaticMode::Overlapped => {
                    let hot = *load.iter().max().unwrap_or(&0);
                    (busiest.max(hot) + cost.hop_cycles(), 1)
                }
            };
            report.total_cycles += round;
            for p in 0..n {
                report.stage_busy.sp[p] += live[p];
                report.bubbles[p] += round - (live[p] * per_hop).min(round);
                report.completed_steps += live[p];
            }
            for (c, l) in load.iter().enumerate() {
                report.channel_accesses[c] += l;
            }
        }
        report.completed_queries += chunk.len() as u64;
    }
    report.window_cycles = report.total_cycles;
    for p in 0..n {
        report.stage_busy.ra[p] = report.stage_busy.sp[p];
        report.stage_busy.ca[p] = report.stage_busy.sp[p];
        report.stage_idle.ra[p] = report.total_cycles - report.stage_busy.ra[p];
        report.stage_idle.sp[p] = report.total_cycles - report.stage_busy.sp[p];
        report.stage_idle.ca[p] = report.total_cycles - report.stage_busy.ca[p];
    }
    Ok((paths, report))
}

/// Serial bulk-synchronous baseline with default costs.
pub fn static_batch_baseline(
    cfg: &SimConfig,
    layout: &MemoryLayout,
    queries: &[Query],
) -> Result<(Paths, SimReport), OracleError> {
    static_batch_run(cfg, layout, queries, StaticMode::Serial, BatchCost::for_config(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_csr, build_layout, fixtures, Edge};

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn uniform_and_weighted() {
        let g = fixtures::complete(5);
        let d = transition_distribution(&g, 0, None, &AlgoParams::urw(10)).unwrap();
        assert!(close(&d, &[0.25; 4]));
        let g = build_csr(&[Edge::weighted(0, 1, 1.0), Edge::weighted(0, 2, 3.0)], 3).unwrap();
        let d = transition_distribution(&g, 0, None, &AlgoParams::new(AlgoKind::DeepWalk)).unwrap();
        assert!(close(&d, &[0.25, 0.75]));
    }

    #[test]
    fn node2vec_classes() {
        // 1 is prev; from 2: back to 1, to 0 (adjacent to 1), to 3 (not adjacent)
        let edges = [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0), (2, 3), (3, 2)]
            .map(|(s, d)| Edge::new(s, d));
        let g = build_csr(&edges, 4).unwrap();
        assert_eq!(g.neighbors(2), &[1, 0, 3]);
        for kind in [AlgoKind::Node2VecReject, AlgoKind::Node2VecReservoir] {
            let p = AlgoParams::node2vec(kind, 2.0, 0.5, 80);
            let d = transition_distribution(&g, 2, Some(1), &p).unwrap();
            assert!(close(&d, &[0.5 / 3.5, 1.0 / 3.5, 2.0 / 3.5]), "{kind}: {d:?}");
        }
    }

    #[test]
    fn metapath_filters_by_type() {
        let g = fixtures::gadget();
        let p = AlgoParams::metapath(vec![0, 1], 10);
        // from 0 (type 0) the next type is 1: neighbors 1 and 7 have types 1 and 2
        let d = transition_distribution(&g, 0, None, &p).unwrap();
        let nbrs = g.neighbors(0);
        for (j, &x) in nbrs.iter().enumerate() {
            assert_eq!(d[j] > 0.0, g.vertex_type(x) == Some(1));
        }
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dead_end_is_an_error() {
        let g = fixtures::chain(3);
        assert!(matches!(
            transition_distribution(&g, 2, None, &AlgoParams::urw(5)),
            Err(OracleError::DeadEnd(2))
        ));
    }

    #[test]
    fn sequential_chain_and_determinism() {
        let g = fixtures::chain(5);
        let cfg = OracleConfig::new(AlgoParams::urw(3), 1, 1);
        let p = run_sequential(&g, &[Query::new(0, 0), Query::new(1, 3)], &cfg).unwrap();
        assert_eq!(p[&0], vec![0, 1, 2, 3]);
        assert_eq!(p[&1], vec![3, 4]);
        let g = fixtures::gadget();
        let qs: Vec<Query> = (0..100).map(|i| Query::new(i, (i % 8) as u32)).collect();
        let cfg = OracleConfig::new(AlgoParams::new(AlgoKind::Node2VecReject), 4, 100);
        assert_eq!(run_sequential(&g, &qs, &cfg).unwrap(), run_sequential(&g, &qs, &cfg).unwrap());
    }

    #[test]
    fn baseline_equal_length_cost() {
        let g = fixtures::complete(4);
        let layout = build_layout(&g, 1, 1, AlgoKind::Urw).unwrap();
        let cfg = SimConfig::new(1, AlgoParams::urw(10), 2);
        let qs: Vec<Query> = (0..256).map(|i| Query::new(i, (i % 4) as u32)).collect();
        let (paths, r) = static_batch_baseline(&cfg, &layout, &qs).unwrap();
        let cost = BatchCost::for_config(&cfg);
        assert_eq!(r.completed_steps, 2560);
        assert_eq!(r.total_cycles, r.completed_steps * cost.hop_cycles());
        assert_eq!(r.total_bubbles(), 0);
        assert_eq!(paths.len(), 256);
    }

    #[test]
    fn overlapped_rounds_are_cheaper() {
        let cost = BatchCost { batch: 256, latency: 101, stage_cycles: 3 };
        assert_eq!(cost.round_cycles(StaticMode::Serial), 256 * 205);
        assert_eq!(cost.round_cycles(StaticMode::Overlapped), 256 + 205);
    }
}
