use crate::graph::{AliasTable, CsrGraph, MemoryLayout, RowPointerEntry, VertexId};
use crate::sampling::AlgoKind;

/// Read access to neighbor lists, from a CSR graph or a channel layout.
///
/// A `Handle` names one neighbor list: a vertex for CSR, a row-pointer entry
/// for the layout (what the row-access stage fetched).
pub trait NeighborSource {
    type Handle: Copy;

    fn num_vertices(&self) -> usize;
    fn handle(&self, v: VertexId) -> Self::Handle;
    fn degree(&self, h: Self::Handle) -> u64;
    fn neighbor(&self, h: Self::Handle, j: u64) -> VertexId;
    /// Edge weight, or 1 on unweighted graphs.
    fn weight(&self, h: Self::Handle, j: u64) -> f64;
    fn alias_sample(&self, h: Self::Handle, r1: u64, r2: u64) -> u64;
    fn vertex_type(&self, v: VertexId) -> Option<u32>;
    fn has_edge(&self, u: VertexId, x: VertexId) -> bool;
}

/// CSR graph plus per-vertex alias tables when the algorithm needs them.
pub struct CsrSource<'a> {
    pub graph: &'a CsrGraph,
    alias: Vec<Option<AliasTable>>,
}

impl<'a> CsrSource<'a> {
    pub fn new(graph: &'a CsrGraph, kind: AlgoKind) -> Self {
        let alias = if kind == AlgoKind::DeepWalk {
            (0..graph.num_vertices() as VertexId)
                .map(|v| {
                    let d = graph.degree(v);
                    (d > 0).then(|| match graph.neighbor_weights(v) {
                        Some(w) => AliasTable::build(w).expect("validated weights"),
                        None => AliasTable::from_integer_weights(&vec![1; d]).expect("nonempty"),
                    })
                })
                .collect()
        } else {
            Vec::new()
        };
        Self { graph, alias }
    }
}

impl NeighborSource for CsrSource<'_> {
    type Handle = VertexId;

    fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    fn handle(&self, v: VertexId) -> VertexId {
        v
    }

    fn degree(&self, v: VertexId) -> u64 {
        self.graph.degree(v) as u64
    }

    fn neighbor(&self, v: VertexId, j: u64) -> VertexId {
        self.graph.neighbors(v)[j as usize]
    }

    fn weight(&self, v: VertexId, j: u64) -> f64 {
        self.graph
            .neighbor_weights(v)
            .map_or(1.0, |w| w[j as usize])
    }

    fn alias_sample(&self, v: VertexId, r1: u64, r2: u64) -> u64 {
        self.alias[v as usize]
            .as_ref()
            .expect("alias table for a non-empty list")
            .sample(r1, r2) as u64
    }

    fn vertex_type(&self, v: VertexId) -> Option<u32> {
        self.graph.vertex_type(v)
    }

    fn has_edge(&self, u: VertexId, x: VertexId) -> bool {
        self.graph.has_edge(u, x)
    }
}

impl NeighborSource for MemoryLayout {
    type Handle = RowPointerEntry;

    fn num_vertices(&self) -> usize {
        MemoryLayout::num_vertices(self)
    }

    fn handle(&self, v: VertexId) -> RowPointerEntry {
        *self.entry(v)
    }

    fn degree(&self, e: RowPointerEntry) -> u64 {
        e.degree as u64
    }

    fn neighbor(&self, e: RowPointerEntry, j: u64) -> VertexId {
        MemoryLayout::neighbor(self, &e, j)
    }

    fn weight(&self, e: RowPointerEntry, j: u64) -> f64 {
        MemoryLayout::weight(self, &e, j)
    }

    fn alias_sample(&self, e: RowPointerEntry, r1: u64, r2: u64) -> u64 {
        MemoryLayout::alias_sample(self, &e, r1, r2) as u64
    }

    fn vertex_type(&self, v: VertexId) -> Option<u32> {
        MemoryLayout::vertex_type(self, v)
    }

    fn has_edge(&self, u: VertexId, x: VertexId) -> bool {
        let e = self.entry(u);
        (0..e.degree as u64).any(|j| MemoryLayout::neighbor(self, e, j) == x)
    }
}
