use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use grw_core::graph::{build_csr, build_layout, fixtures, Edge, VertexId};
use grw_core::oracle::{run_sequential, transition_distribution, OracleConfig};
use grw_core::sampling::{AlgoKind, AlgoParams};
use grw_core::sim::{simulate, SimConfig};
use grw_core::walk::Query;

fn p_value(observed: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    1.0 - ChiSquared::new((probs.len() - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn uniform_walks_on_k4_are_uniform() {
    let g = fixtures::complete(4);
    let qs: Vec<Query> = (0..100_000).map(|i| Query::new(i, 0)).collect();
    let paths = run_sequential(&g, &qs, &OracleConfig::new(AlgoParams::urw(1), 12, qs.len())).unwrap();
    let mut counts = [0u64; 3];
    for p in paths.values() {
        counts[p[1] as usize - 1] += 1;
    }
    assert!(p_value(&counts, &[1.0 / 3.0; 3]) > 0.01, "{counts:?}");
}

#[test]
fn node2vec_on_a_path_graph_returns_one_time_in_five() {
    // from 1 having come from 0: back to 0 weighs 1/p, on to 2 weighs 1/q
    let g = fixtures::undirected_path(4);
    let qs: Vec<Query> = (0..1_000_000).map(|i| Query::new(i, 0)).collect();
    for kind in [AlgoKind::Node2VecReject, AlgoKind::Node2VecReservoir] {
        let params = AlgoParams::node2vec(kind, 2.0, 0.5, 2);
        let exact = transition_distribution(&g, 1, Some(0), &params).unwrap();
        assert_eq!(exact, vec![0.2, 0.8]);
        let paths = run_sequential(&g, &qs, &OracleConfig::new(params, 5, qs.len())).unwrap();
        let back = paths.values().filter(|p| p[2] == 0).count() as f64 / qs.len() as f64;
        assert!((back - 0.2).abs() < 0.01 * 0.2, "{kind}: {back}");
    }
}

fn small_graph() -> impl Strategy<Value = (usize, Vec<(VertexId, VertexId, f64)>)> {
    (2usize..12).prop_flat_map(|n| {
        let e = (0..n as VertexId, 0..n as VertexId, 0.5f64..4.0);
        (Just(n), prop::collection::vec(e, 1..40))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn simulated_walks_follow_edges_and_match_the_oracle(
        (n, raw) in small_graph(),
        kind_idx in 0usize..5,
        max_len in 1u32..10,
        seed in any::<u64>(),
    ) {
        let kind = AlgoKind::ALL[kind_idx];
        let edges: Vec<Edge> = raw.iter().map(|&(s, d, w)| Edge::weighted(s, d, w)).collect();
        let g = build_csr(&edges, n).unwrap();
        let params = AlgoParams::new(kind).with_max_len(max_len);
        let qs: Vec<Query> = (0..40).map(|i| Query::new(i, (i % n as u64) as VertexId)).collect();
        let layout = build_layout(&g, 2, 2, kind).unwrap();
        let out = simulate(&SimConfig::new(2, params.clone(), seed), &layout, &qs).unwrap();
        let oracle = run_sequential(&g, &qs, &OracleConfig::new(params, seed, qs.len())).unwrap();
        prop_assert_eq!(&out.paths, &oracle);
        for (qid, p) in &out.paths {
            prop_assert_eq!(p[0], qs[*qid as usize].v_start);
            prop_assert!(p.len() as u32 <= max_len + 1);
            for w in p.windows(2) {
                prop_assert!(g.has_edge(w[0], w[1]), "{} -> {} is not an edge", w[0], w[1]);
            }
            // a walk stops early only at a dead end
            if (p.len() as u32) < max_len + 1 && kind != AlgoKind::Ppr {
                prop_assert_eq!(g.degree(*p.last().unwrap()), 0);
            }
        }
    }
}
