//! Graph loading, query generation and one simulated run per mode.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use grw_core::graph::{
    assign_weights, build_csr, gen_rmat, load_types, read_csr_cache, read_edge_list_file, CsrGraph,
    MemoryLayout, VertexId,
};
use grw_core::metrics::RunRow;
use grw_core::oracle::{static_batch_run, BatchCost, Paths, StaticMode};
use grw_core::sampling::{key_from_seed, AlgoKind, RngStream};
use grw_core::sim::{simulate, SimReport, TraceLog};
use grw_core::walk::Query;

use crate::config::{ExperimentConfig, GraphSource, Mode, TypeSource};
use crate::error::CliError;

const QUERY_STREAM: u64 = 3;

fn with_path<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

pub fn load_graph(cfg: &ExperimentConfig) -> Result<CsrGraph, CliError> {
    let g = match &cfg.graph {
        GraphSource::File(path) if path.extension().is_some_and(|e| e == "csr") => {
            read_csr_cache(File::open(path)?).map_err(with_path(path))?
        }
        GraphSource::File(path) => {
            let list = read_edge_list_file(path).map_err(with_path(path))?;
            build_csr(&list.edges, list.num_vertices).map_err(with_path(path))?
        }
        GraphSource::Rmat { params, seed, weighted } => {
            let mut edges = gen_rmat(params, *seed)?;
            if *weighted {
                assign_weights(&mut edges, *seed);
            }
            build_csr(&edges, params.num_vertices())?
        }
    };
    let types = match &cfg.types {
        TypeSource::None => return Ok(g),
        TypeSource::File(path) => load_types(BufReader::new(File::open(path)?)).map_err(with_path(path))?,
        TypeSource::Modulo(k) => (0..g.num_vertices() as u32).map(|v| v % k).collect(),
    };
    Ok(g.with_vertex_types(types)?)
}

/// Valid walk starts: vertices with out-edges, of the first schema type for
/// metapath walks.
fn start_candidates(g: &CsrGraph, cfg: &ExperimentConfig) -> Vec<VertexId> {
    let first_type = (cfg.params.kind == AlgoKind::MetaPath).then(|| cfg.params.schema[0]);
    (0..g.num_vertices() as VertexId)
        .filter(|&v| g.degree(v) > 0)
        .filter(|&v| first_type.is_none() || g.vertex_type(v) == first_type)
        .collect()
}

/// Reads one start vertex per line, or draws `cfg.queries` uniform starts.
pub fn make_queries(g: &CsrGraph, cfg: &ExperimentConfig, seed: u64) -> Result<Vec<Query>, CliError> {
    if let Some(path) = &cfg.query_file {
        let text = std::fs::read_to_string(path)?;
        let mut queries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let v: VertexId = body
                .parse()
                .map_err(|_| CliError::Input(format!("{}: line {}: invalid vertex {body:?}", path.display(), i + 1)))?;
            let q = Query::new(queries.len() as u64, v);
            q.validate(g.num_vertices())
                .map_err(|e| CliError::Input(format!("{}: line {}: {e}", path.display(), i + 1)))?;
            queries.push(q);
        }
        return Ok(queries);
    }
    if cfg.queries == 0 {
        return Ok(Vec::new());
    }
    let starts = start_candidates(g, cfg);
    if starts.is_empty() {
        return Err(CliError::Input("graph has no vertex a walk can start from".into()));
    }
    let mut rng = RngStream::new(key_from_seed(seed), QUERY_STREAM);
    Ok((0..cfg.queries as u64)
        .map(|i| {
            let j = ((rng.next_u64() as u128 * starts.len() as u128) >> 64) as usize;
            Query::new(i, starts[j])
        })
        .collect())
}

pub fn build_layout(g: &CsrGraph, cfg: &ExperimentConfig, n: usize) -> Result<MemoryLayout, CliError> {
    Ok(MemoryLayout::build(g, n, n, cfg.params.kind, cfg.block_mode)?)
}

pub struct RunOutput {
    pub paths: Paths,
    pub report: SimReport,
    pub trace: TraceLog,
}

pub fn run_mode(
    cfg: &ExperimentConfig,
    layout: &MemoryLayout,
    queries: &[Query],
    mode: Mode,
    seed: u64,
) -> Result<RunOutput, CliError> {
    let mut sim = cfg.sim_config(seed);
    let batch = |m| -> Result<RunOutput, CliError> {
        let (paths, report) = static_batch_run(&sim, layout, queries, m, BatchCost::for_config(&sim))?;
        Ok(RunOutput { paths, report, trace: TraceLog::default() })
    };
    match mode {
        Mode::Baseline => batch(StaticMode::Serial),
        Mode::AsyncOnly => batch(StaticMode::Overlapped),
        Mode::Combined | Mode::SchedulerOnly => {
            if mode == Mode::SchedulerOnly {
                sim.mem.max_outstanding = 1;
            }
            let out = simulate(&sim, layout, queries)?;
            Ok(RunOutput { paths: out.paths, report: out.report, trace: out.trace })
        }
    }
}

pub fn summary_row(cfg: &ExperimentConfig, run_id: String, report: &SimReport) -> Result<RunRow, CliError> {
    Ok(RunRow::from_report(run_id, cfg.graph.label(), report, &cfg.mem, cfg.clock_hz)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Settings;

    fn cfg(pairs: &[(&str, &str)]) -> ExperimentConfig {
        let mut s = Settings::default();
        for (k, v) in [("graph.rmat_scale", "6"), ("run.seed", "9"), ("sim.pipelines", "4")]
            .iter()
            .chain(pairs)
        {
            s.set(k, v).unwrap();
        }
        ExperimentConfig::from_settings(&s).unwrap()
    }

    #[test]
    fn queries_start_where_walks_can_move() {
        let c = cfg(&[("run.queries", "500"), ("graph.rmat_kind", "graph500")]);
        let g = load_graph(&c).unwrap();
        let qs = make_queries(&g, &c, 9).unwrap();
        assert_eq!(qs.len(), 500);
        assert!(qs.iter().all(|q| g.degree(q.v_start) > 0));
        assert_eq!(qs, make_queries(&g, &c, 9).unwrap());
        assert_ne!(qs, make_queries(&g, &c, 10).unwrap());
    }

    #[test]
    fn metapath_queries_start_on_the_first_type() {
        let c = cfg(&[("run.queries", "200"), ("algo.name", "metapath"), ("algo.schema", "1,0"), ("graph.types", "mod:2")]);
        let g = load_graph(&c).unwrap();
        for q in make_queries(&g, &c, 1).unwrap() {
            assert_eq!(q.v_start % 2, 1);
        }
    }

    #[test]
    fn every_mode_walks_the_same_paths() {
        let c = cfg(&[("run.queries", "300"), ("algo.max_len", "10")]);
        let g = load_graph(&c).unwrap();
        let qs = make_queries(&g, &c, 1).unwrap();
        let layout = build_layout(&g, &c, 4).unwrap();
        let outs: Vec<RunOutput> = Mode::ALL
            .iter()
            .map(|&m| run_mode(&c, &layout, &qs, m, 1).unwrap())
            .collect();
        for o in &outs[1..] {
            assert_eq!(o.paths, outs[0].paths);
            assert_eq!(o.report.completed_steps, outs[0].report.completed_steps);
        }
    }
}
