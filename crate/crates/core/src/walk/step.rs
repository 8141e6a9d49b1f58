use super::source::NeighborSource;
use super::task::{termination, Termination, WalkTask};
use crate::sampling::{
    node2vec_envelope, node2vec_trial, node2vec_weight, unit_f64, AlgoKind, AlgoParams,
    ReservoirState, RngStream, SamplingError,
};

/// Why a walk ended before its hop cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    DeadEnd,
    Teleport,
    NoTypeMatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Stop(StopReason),
    /// A rejection trial failed; run the hop again with `retries + 1`.
    Retry,
    /// Local neighbor index; `last` marks the final hop of the walk.
    Sampled { index: u64, last: bool },
}

/// Draw `idx` of hop `hop` of query `query_id`. Index 0 is the termination
/// draw; samplers use indices from 1.
#[inline]
pub fn draw(key: u64, query_id: u64, hop: u32, idx: u32) -> u64 {
    RngStream::at(key, query_id, (hop as u64) << 32 | idx as u64).peek()
}

/// Executes the sampling stage of one hop (or one rejection trial).
pub fn sample_step<S: NeighborSource>(
    src: &S,
    h: S::Handle,
    t: &WalkTask,
    params: &AlgoParams,
    key: u64,
) -> Result<StepOutcome, SamplingError> {
    let d = |i: u32| draw(key, t.query_id, t.hop, i);
    let degree = src.degree(h);
    let expected_type = if params.kind == AlgoKind::MetaPath {
        Some(params.schema[(t.payload as usize + 1) % params.schema.len()])
    } else {
        None
    };
    let candidates = match expected_type {
        Some(ty) => {
            let mut n = 0;
            for j in 0..degree {
                let x = src.neighbor(h, j);
                if src.vertex_type(x).ok_or(SamplingError::MissingTypes)? == ty {
                    n += 1;
                }
            }
            n
        }
        None => degree,
    };
    let last = match termination(t, candidates, params, unit_f64(d(0))) {
        Termination::Stop => {
            let reason = if degree == 0 {
                StopReason::DeadEnd
            } else if candidates == 0 {
                StopReason::NoTypeMatch
            } else {
                StopReason::Teleport
            };
            return Ok(StepOutcome::Stop(reason));
        }
        Termination::LastHop => true,
        Termination::Continue => false,
    };
    let index = match params.kind {
        AlgoKind::Urw | AlgoKind::Ppr => crate::sampling::sample_uniform(degree, d(1))?,
        AlgoKind::DeepWalk => src.alias_sample(h, d(1), d(2)),
        AlgoKind::Node2VecReject => {
            let weight_of = |j: u64| {
                let x = src.neighbor(h, j);
                node2vec_weight(x, t.prev, src.has_edge(t.prev, x), params.p, params.q)
            };
            let i = 1 + 2 * t.stage.retries;
            match node2vec_trial(degree, d(i), d(i + 1), weight_of, node2vec_envelope(params.p, params.q)) {
                Some(j) => j,
                None => return Ok(StepOutcome::Retry),
            }
        }
        AlgoKind::Node2VecReservoir | AlgoKind::MetaPath => {
            let mut state = ReservoirState::default();
            for j in 0..degree {
                let x = src.neighbor(h, j);
                let w = if let Some(ty) = expected_type {
                    if src.vertex_type(x) != Some(ty) {
                        continue;
                    }
                    src.weight(h, j)
                } else {
                    src.weight(h, j)
                        * node2vec_weight(x, t.prev, src.has_edge(t.prev, x), params.p, params.q)
                };
                state.offer(j as usize, w, d(1 + j as u32));
            }
            state.chosen.ok_or(SamplingError::AllZeroWeights)? as u64
        }
    };
    Ok(StepOutcome::Sampled { index, last })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{chain, gadget};
    use crate::graph::{build_layout, VertexId};
    use crate::sampling::key_from_seed;
    use crate::walk::{make_task, CsrSource, Query};

    #[test]
    fn chain_walk_is_forced() {
        let g = chain(4);
        let src = CsrSource::new(&g, AlgoKind::Urw);
        let p = AlgoParams::urw(3);
        let mut t = make_task(&Query::new(0, 0));
        let mut outs = Vec::new();
        loop {
            match sample_step(&src, t.curr, &t, &p, 1).unwrap() {
                StepOutcome::Sampled { index, last } => {
                    let next = src.neighbor(t.curr, index);
                    outs.push(next);
                    t = crate::walk::advance(&t, next, &p);
                    if last {
                        break;
                    }
                }
                other => panic!("{other:?}"),
            }
        }
        assert_eq!(outs, vec![1, 2, 3]);
        assert_eq!(
            sample_step(&src, 3, &t, &AlgoParams::urw(10), 1).unwrap(),
            StepOutcome::Stop(StopReason::DeadEnd)
        );
    }

    #[test]
    fn layout_and_csr_agree() {
        let g = gadget();
        let key = key_from_seed(11);
        for kind in AlgoKind::ALL {
            let params = AlgoParams::new(kind);
            let csr = CsrSource::new(&g, kind);
            let layout = build_layout(&g, 2, 3, kind).unwrap();
            for q in 0..200u64 {
                let mut t = make_task(&Query::new(q, (q % 8) as VertexId));
                t.hop = (q % 5) as u32;
                t.prev = ((q * 3) % 8) as VertexId;
                t.payload = (q % 2) as u32;
                t.stage.retries = (q % 3) as u32;
                let a = sample_step(&csr, t.curr, &t, &params, key).unwrap();
                let b = sample_step(&layout, layout.handle(t.curr), &t, &params, key).unwrap();
                assert_eq!(a, b, "{kind:?} query {q}");
            }
        }
    }

    #[test]
    fn metapath_without_match_stops() {
        let g = gadget();
        let src = CsrSource::new(&g, AlgoKind::MetaPath);
        // no vertex has type 9
        let p = AlgoParams::metapath(vec![0, 9], 80);
        let t = make_task(&Query::new(0, 0));
        assert_eq!(
            sample_step(&src, 0, &t, &p, 0).unwrap(),
            StepOutcome::Stop(StopReason::NoTypeMatch)
        );
    }
}
