//! Immutable compressed-sparse-row graph.

use super::GraphError;

pub type VertexId = u32;

/// An input edge: `(src, dst, weight)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: Option<f64>,
}

impl Edge {
    pub fn new(src: VertexId, dst: VertexId) -> Self {
        Self {
            src,
            dst,
            weight: None,
        }
    }

    pub fn weighted(src: VertexId, dst: VertexId, weight: f64) -> Self {
        Self {
            src,
            dst,
            weight: Some(weight),
        }
    }
}

/// Row-pointer / column-list adjacency with optional edge weights and vertex labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrGraph {
    row_ptr: Vec<u64>,
    col_list: Vec<VertexId>,
    weights: Option<Vec<f64>>,
    vertex_types: Option<Vec<u32>>,
}

impl CsrGraph {
    /// Builds a CSR graph; neighbors of each vertex keep their input order.
    ///
    /// Weights are kept only when every edge carries one.
    pub fn build(edges: &[Edge], num_vertices: usize) -> Result<Self, GraphError> {
        let weighted = !edges.is_empty() && edges.iter().all(|e| e.weight.is_some());
        let mut degree = vec![0u64; num_vertices];
        for (i, e) in edges.iter().enumerate() {
            for v in [e.src, e.dst] {
                if v as usize >= num_vertices {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: v as u64,
                        num_vertices,
                    });
                }
            }
            if let Some(w) = e.weight {
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(GraphError::InvalidWeight { edge: i, weight: w });
                }
            }
            degree[e.src as usize] += 1;
        }

        let mut row_ptr = Vec::with_capacity(num_vertices + 1);
        row_ptr.push(0u64);
        for d in &degree {
            let last = *row_ptr.last().unwrap();
            row_ptr.push(last + d);
        }

        let mut cursor: Vec<u64> = row_ptr[..num_vertices].to_vec();
        let mut col_list = vec![0 as VertexId; edges.len()];
        let mut weights = weighted.then(|| vec![0.0; edges.len()]);
        for e in edges {
            let slot = &mut cursor[e.src as usize];
            col_list[*slot as usize] = e.dst;
            if let Some(w) = weights.as_mut() {
                w[*slot as usize] = e.weight.unwrap();
            }
            *slot += 1;
        }

        let g = Self {
            row_ptr,
            col_list,
            weights,
            vertex_types: None,
        };
        if let Some(w) = &g.weights {
            for v in 0..num_vertices {
                let r = g.range(v as VertexId);
                if !r.is_empty() && w[r].iter().all(|&x| x == 0.0) {
                    return Err(GraphError::ZeroWeightList(v as VertexId));
                }
            }
        }
        Ok(g)
    }

    /// Assembles a graph from raw arrays, checking every structural invariant.
    pub fn from_parts(
        row_ptr: Vec<u64>,
        col_list: Vec<VertexId>,
        weights: Option<Vec<f64>>,
        vertex_types: Option<Vec<u32>>,
    ) -> Result<Self, GraphError> {
        let bad = |msg: &str| Err(GraphError::Malformed(msg.to_string()));
        if row_ptr.first() != Some(&0) {
            return bad("row_ptr[0] must be 0");
        }
        let n = row_ptr.len() - 1;
        if *row_ptr.last().unwrap() != col_list.len() as u64 {
            return bad("row_ptr[n] must equal the edge count");
        }
        if row_ptr.windows(2).any(|w| w[0] > w[1]) {
            return bad("row_ptr must be nondecreasing");
        }
        if let Some(&v) = col_list.iter().find(|&&v| v as usize >= n) {
            return Err(GraphError::VertexOutOfRange {
                vertex: v as u64,
                num_vertices: n,
            });
        }
        if weights.as_ref().is_some_and(|w| w.len() != col_list.len()) {
            return bad("weights must align with col_list");
        }
        let g = Self {
            row_ptr,
            col_list,
            weights,
            vertex_types: None,
        };
        if let Some(w) = &g.weights {
            if let Some((i, &x)) = w.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
                return Err(GraphError::InvalidWeight { edge: i, weight: x });
            }
            for v in 0..n {
                let r = g.range(v as VertexId);
                if !r.is_empty() && w[r].iter().all(|&x| x == 0.0) {
                    return Err(GraphError::ZeroWeightList(v as VertexId));
                }
            }
        }
        match vertex_types {
            Some(t) => g.with_vertex_types(t),
            None => Ok(g),
        }
    }

    pub fn with_vertex_types(mut self, types: Vec<u32>) -> Result<Self, GraphError> {
        if types.len() != self.num_vertices() {
            return Err(GraphError::TypeCountMismatch {
                expected: self.num_vertices(),
                found: types.len(),
            });
        }
        self.vertex_types = Some(types);
        Ok(self)
    }

    /// Replaces (or attaches) edge weights.
    pub fn with_weights(self, weights: Vec<f64>) -> Result<Self, GraphError> {
        let types = self.vertex_types.clone();
        Self::from_parts(self.row_ptr, self.col_list, Some(weights), types)
    }

    pub fn num_vertices(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.col_list.len()
    }

    pub fn row_ptr(&self) -> &[u64] {
        &self.row_ptr
    }

    pub fn col_list(&self) -> &[VertexId] {
        &self.col_list
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn vertex_types(&self) -> Option<&[u32]> {
        self.vertex_types.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    #[inline]
    pub fn range(&self, v: VertexId) -> std::ops::Range<usize> {
        self.row_ptr[v as usize] as usize..self.row_ptr[v as usize + 1] as usize
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        (self.row_ptr[v as usize + 1] - self.row_ptr[v as usize]) as usize
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.col_list[self.range(v)]
    }

    pub fn neighbor_weights(&self, v: VertexId) -> Option<&[f64]> {
        self.weights.as_ref().map(|w| &w[self.range(v)])
    }

    pub fn has_edge(&self, u: VertexId, x: VertexId) -> bool {
        self.neighbors(u).contains(&x)
    }

    pub fn vertex_type(&self, v: VertexId) -> Option<u32> {
        self.vertex_types.as_ref().map(|t| t[v as usize])
    }
}

/// Builds a CSR graph from an edge list.
pub fn build_csr(edges: &[Edge], num_vertices: usize) -> Result<CsrGraph, GraphError> {
    CsrGraph::build(edges, num_vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::figure_graph;

    #[test]
    fn figure_graph_offsets() {
        let g = figure_graph();
        assert_eq!(g.row_ptr()[2], 3);
        assert_eq!(g.neighbors(2), &[0, 4, 5]);
    }

    #[test]
    fn empty_graph() {
        let g = build_csr(&[], 3).unwrap();
        assert_eq!(g.row_ptr(), &[0, 0, 0, 0]);
        assert!(g.col_list().is_empty());
    }

    #[test]
    fn small_graph_row_ptr() {
        let edges = [Edge::new(0, 1), Edge::new(0, 2), Edge::new(1, 0)];
        let g = build_csr(&edges, 3).unwrap();
        assert_eq!(g.row_ptr(), &[0, 2, 3, 3]);
        assert_eq!(g.col_list(), &[1, 2, 0]);
    }

    #[test]
    fn stable_neighbor_order() {
        let edges = [Edge::new(1, 2), Edge::new(0, 3), Edge::new(1, 0), Edge::new(1, 1)];
        let g = build_csr(&edges, 4).unwrap();
        assert_eq!(g.neighbors(1), &[2, 0, 1]);
    }

    #[test]
    fn rejects_out_of_range_and_negative() {
        assert!(matches!(
            build_csr(&[Edge::new(0, 3)], 3),
            Err(GraphError::VertexOutOfRange { vertex: 3, .. })
        ));
        assert!(matches!(
            build_csr(&[Edge::weighted(0, 1, -1.0)], 3),
            Err(GraphError::InvalidWeight { .. })
        ));
        assert!(matches!(
            build_csr(&[Edge::weighted(0, 1, 0.0)], 3),
            Err(GraphError::ZeroWeightList(0))
        ));
    }

    #[test]
    fn from_parts_checks_invariants() {
        assert!(CsrGraph::from_parts(vec![0, 2, 1], vec![0, 1], None, None).is_err());
        assert!(CsrGraph::from_parts(vec![0, 1], vec![4], None, None).is_err());
        let g = CsrGraph::from_parts(vec![0, 1, 1], vec![1], None, Some(vec![3, 4])).unwrap();
        assert_eq!(g.vertex_type(1), Some(4));
    }
}
