//! Small deterministic graphs shared by tests, examples, and the acceptance suite.

use super::{build_csr, CsrGraph, Edge, VertexId};

/// Six vertices; `row_ptr[2] == 3`, so v2's neighbors begin at column offset 3.
pub fn figure_graph() -> CsrGraph {
    let edges = [
        (0, 1),
        (0, 2),
        (1, 3),
        (2, 0),
        (2, 4),
        (2, 5),
        (3, 5),
        (4, 1),
        (5, 2),
    ]
    .map(|(s, d)| Edge::new(s, d));
    build_csr(&edges, 6).expect("fixture")
}

/// Directed chain `0 -> 1 -> ... -> n-1`; the last vertex is a dead end.
pub fn chain(n: usize) -> CsrGraph {
    let edges: Vec<Edge> = (1..n as VertexId).map(|v| Edge::new(v - 1, v)).collect();
    build_csr(&edges, n).expect("fixture")
}

/// Complete directed graph without self loops.
pub fn complete(n: usize) -> CsrGraph {
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1));
    for u in 0..n as VertexId {
        for v in 0..n as VertexId {
            if u != v {
                edges.push(Edge::new(u, v));
            }
        }
    }
    build_csr(&edges, n).expect("fixture")
}

/// Undirected path `0 - 1 - ... - n-1` stored as directed pairs.
pub fn undirected_path(n: usize) -> CsrGraph {
    let mut edges = Vec::new();
    for v in 0..n as VertexId {
        if v > 0 {
            edges.push(Edge::new(v, v - 1));
        }
        if (v as usize) + 1 < n {
            edges.push(Edge::new(v, v + 1));
        }
    }
    build_csr(&edges, n).expect("fixture")
}

/// A small weighted, typed graph with every neighbor-class combination
/// (return edge, triangle edge, distant edge) and no dead ends.
///
/// Types alternate 0/1 by vertex parity except vertex 7, which is type 2.
pub fn gadget() -> CsrGraph {
    let undirected = [
        (0, 1, 1.0),
        (0, 2, 2.0),
        (1, 2, 3.0),
        (1, 3, 1.5),
        (2, 4, 1.0),
        (3, 4, 2.5),
        (3, 5, 1.0),
        (4, 6, 4.0),
        (5, 6, 1.0),
        (5, 7, 2.0),
        (6, 7, 0.5),
        (0, 7, 1.0),
        (2, 3, 2.0),
    ];
    let mut edges = Vec::new();
    for (u, v, w) in undirected {
        edges.push(Edge::weighted(u, v, w));
        edges.push(Edge::weighted(v, u, w));
    }
    let types = (0..8u32).map(|v| if v == 7 { 2 } else { v % 2 }).collect();
    build_csr(&edges, 8)
        .and_then(|g| g.with_vertex_types(types))
        .expect("fixture")
}
