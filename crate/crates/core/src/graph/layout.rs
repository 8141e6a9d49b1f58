//! Channelized placement of a CSR graph across row and column memory channels.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::alias::{integer_weights, AliasTable};
use super::rp_entry::{EntryWidth, RowPointerEntry, RpAux, CHANNEL_BITS, DEGREE_BITS};
use super::{CsrGraph, GraphError, VertexId};
use crate::sampling::AlgoKind;

/// How column-list data is spread over column channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockMode {
    /// Each neighbor list stays whole; list `v` lands on channel `v % C`.
    WholeList,
    /// Fixed blocks of `k` edges of the global column list, dealt round-robin.
    Edges(u64),
}

/// Physical position of one neighbor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborLocation {
    pub channel: usize,
    pub offset: u64,
}

/// Per-column-channel storage. Auxiliary arrays are index-aligned with `cols`.
#[derive(Debug, Clone, Default)]
pub struct ColumnStore {
    pub cols: Vec<VertexId>,
    pub weights: Vec<f64>,
    pub alias_threshold: Vec<u64>,
    pub alias: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct MemoryLayout {
    num_vertices: usize,
    num_edges: usize,
    rows_base: usize,
    rows_rem: usize,
    rp_store: Vec<Vec<RowPointerEntry>>,
    cl_store: Vec<ColumnStore>,
    block_mode: BlockMode,
    width: EntryWidth,
    weighted: bool,
    vertex_types: Option<Vec<u32>>,
}

pub fn build_layout(
    g: &CsrGraph,
    n_row_channels: usize,
    n_col_channels: usize,
    algo: AlgoKind,
) -> Result<MemoryLayout, GraphError> {
    MemoryLayout::build(g, n_row_channels, n_col_channels, algo, BlockMode::WholeList)
}

impl MemoryLayout {
    pub fn build(
        g: &CsrGraph,
        n_row_channels: usize,
        n_col_channels: usize,
        algo: AlgoKind,
        block_mode: BlockMode,
    ) -> Result<Self, GraphError> {
        if n_row_channels == 0 || n_col_channels == 0 {
            return Err(GraphError::InvalidParameter(
                "channel counts must be at least 1".into(),
            ));
        }
        if n_col_channels > 1 << CHANNEL_BITS {
            return Err(GraphError::FieldOverflow {
                field: "channel",
                value: n_col_channels as u64 - 1,
                bits: CHANNEL_BITS,
            });
        }
        if block_mode == BlockMode::Edges(0) {
            return Err(GraphError::InvalidParameter("block size must be positive".into()));
        }
        let n = g.num_vertices();
        let c = n_col_channels;
        let width = EntryWidth::for_algo(algo);
        let mut cl_store = vec![ColumnStore::default(); c];
        let mut starts = Vec::with_capacity(n);
        match block_mode {
            BlockMode::WholeList => {
                for v in 0..n as VertexId {
                    let store = &mut cl_store[v as usize % c];
                    starts.push(NeighborLocation {
                        channel: v as usize % c,
                        offset: store.cols.len() as u64,
                    });
                    store.cols.extend_from_slice(g.neighbors(v));
                    if let Some(w) = g.neighbor_weights(v) {
                        store.weights.extend_from_slice(w);
                    }
                }
            }
            BlockMode::Edges(k) => {
                for (e, &x) in g.col_list().iter().enumerate() {
                    let ch = (e as u64 / k) as usize % c;
                    cl_store[ch].cols.push(x);
                    if let Some(w) = g.weights() {
                        cl_store[ch].weights.push(w[e]);
                    }
                }
                for v in 0..n {
                    let b = g.row_ptr()[v] / k;
                    starts.push(NeighborLocation {
                        channel: (b % c as u64) as usize,
                        offset: (b / c as u64) * k + g.row_ptr()[v] % k,
                    });
                }
            }
        }
        if width == EntryWidth::W256 {
            for store in &mut cl_store {
                store.alias_threshold = vec![0; store.cols.len()];
                store.alias = vec![0; store.cols.len()];
            }
        }

        let mut layout = Self {
            num_vertices: n,
            num_edges: g.num_edges(),
            rows_base: n / n_row_channels,
            rows_rem: n % n_row_channels,
            rp_store: vec![Vec::new(); n_row_channels],
            cl_store,
            block_mode,
            width,
            weighted: g.is_weighted(),
            vertex_types: g.vertex_types().map(|t| t.to_vec()),
        };

        for v in 0..n as VertexId {
            let degree = g.degree(v) as u64;
            if degree >= 1 << DEGREE_BITS {
                return Err(GraphError::FieldOverflow {
                    field: "degree",
                    value: degree,
                    bits: DEGREE_BITS,
                });
            }
            let start = starts[v as usize];
            let mut entry = RowPointerEntry {
                channel: start.channel as u32,
                cl_start: start.offset,
                degree: degree as u32,
                aux: RpAux::None,
            };
            entry.aux = match width {
                EntryWidth::W64 => RpAux::None,
                EntryWidth::W128 => RpAux::WeightRef(start.offset),
                EntryWidth::W256 => {
                    let mut total = 0;
                    if degree > 0 {
                        let table = match g.neighbor_weights(v) {
                            Some(w) => AliasTable::from_integer_weights(&integer_weights(w)?)?,
                            None => AliasTable::from_integer_weights(&vec![1; degree as usize])?,
                        };
                        for j in 0..degree {
                            let loc = layout.locate(&entry, j);
                            let store = &mut layout.cl_store[loc.channel];
                            store.alias_threshold[loc.offset as usize] =
                                table.thresholds()[j as usize];
                            store.alias[loc.offset as usize] = table.aliases()[j as usize];
                        }
                        total = table.total();
                    }
                    RpAux::Alias {
                        alias_ref: start.offset,
                        alias_size: degree as u32,
                        alias_total: total,
                    }
                }
            };
            // rejects values outside the bit budget
            entry.encode()?;
            let ch = layout.row_channel_of(v);
            layout.rp_store[ch].push(entry);
        }
        Ok(layout)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn n_row_channels(&self) -> usize {
        self.rp_store.len()
    }

    pub fn n_col_channels(&self) -> usize {
        self.cl_store.len()
    }

    pub fn block_mode(&self) -> BlockMode {
        self.block_mode
    }

    pub fn entry_width(&self) -> EntryWidth {
        self.width
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn vertex_types(&self) -> Option<&[u32]> {
        self.vertex_types.as_deref()
    }

    pub fn vertex_type(&self, v: VertexId) -> Option<u32> {
        self.vertex_types.as_ref().map(|t| t[v as usize])
    }

    /// Row channel holding the entry of `v`.
    pub fn row_channel_of(&self, v: VertexId) -> usize {
        let v = v as usize;
        let big = self.rows_rem * (self.rows_base + 1);
        if v < big {
            v / (self.rows_base + 1)
        } else {
            self.rows_rem + (v - big) / self.rows_base
        }
    }

    pub fn row_range(&self, ch: usize) -> Range<usize> {
        let start = ch * self.rows_base + ch.min(self.rows_rem);
        let len = self.rows_base + usize::from(ch < self.rows_rem);
        start..start + len
    }

    pub fn rp_store(&self, ch: usize) -> &[RowPointerEntry] {
        &self.rp_store[ch]
    }

    pub fn cl_store(&self, ch: usize) -> &ColumnStore {
        &self.cl_store[ch]
    }

    pub fn entry(&self, v: VertexId) -> &RowPointerEntry {
        let ch = self.row_channel_of(v);
        &self.rp_store[ch][v as usize - self.row_range(ch).start]
    }

    /// Where the `j`-th neighbor described by `entry` lives.
    pub fn locate(&self, entry: &RowPointerEntry, j: u64) -> NeighborLocation {
        match self.block_mode {
            BlockMode::WholeList => NeighborLocation {
                channel: entry.channel as usize,
                offset: entry.cl_start + j,
            },
            BlockMode::Edges(k) => {
                let c = self.cl_store.len() as u64;
                let b = (entry.cl_start / k) * c + entry.channel as u64;
                let global = b * k + entry.cl_start % k + j;
                let b = global / k;
                NeighborLocation {
                    channel: (b % c) as usize,
                    offset: (b / c) * k + global % k,
                }
            }
        }
    }

    pub fn neighbor(&self, entry: &RowPointerEntry, j: u64) -> VertexId {
        let loc = self.locate(entry, j);
        self.cl_store[loc.channel].cols[loc.offset as usize]
    }

    /// Edge weight of slot `j`, or 1 on unweighted graphs.
    pub fn weight(&self, entry: &RowPointerEntry, j: u64) -> f64 {
        if !self.weighted {
            return 1.0;
        }
        let loc = self.locate(entry, j);
        self.cl_store[loc.channel].weights[loc.offset as usize]
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let e = self.entry(v);
        (0..e.degree as u64).map(|j| self.neighbor(e, j)).collect()
    }

    /// Alias draw through the channel-resident table of `entry`.
    pub fn alias_sample(&self, entry: &RowPointerEntry, r1: u64, r2: u64) -> usize {
        let RpAux::Alias { alias_total, .. } = entry.aux else {
            panic!("row pointer entry carries no alias table");
        };
        let slot = ((r1 as u128 * entry.degree as u128) >> 64) as u64;
        let coin = ((r2 as u128 * alias_total as u128) >> 64) as u64;
        let loc = self.locate(entry, slot);
        let store = &self.cl_store[loc.channel];
        if coin < store.alias_threshold[loc.offset as usize] {
            slot as usize
        } else {
            store.alias[loc.offset as usize] as usize
        }
    }
}
