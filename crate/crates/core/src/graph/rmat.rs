//! Recursive-matrix (R-MAT) synthetic graph generator.

use serde::{Deserialize, Serialize};

use super::{Edge, GraphError, VertexId};
use crate::sampling::rng::{key_from_seed, RngStream};

/// Generator parameters. Graphs are conventionally labelled `SC{scale}-{edge_factor}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmatParams {
    pub scale: u32,
    pub edge_factor: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Relabel vertices with a seeded random permutation, as Graph500 does,
    /// so hub vertices do not cluster at low ids.
    pub scramble: bool,
}

impl RmatParams {
    pub fn balanced(scale: u32, edge_factor: u32) -> Self {
        Self {
            scale,
            edge_factor,
            a: 0.25,
            b: 0.25,
            c: 0.25,
            d: 0.25,
            scramble: true,
        }
    }

    pub fn graph500(scale: u32, edge_factor: u32) -> Self {
        Self {
            scale,
            edge_factor,
            a: 0.57,
            b: 0.19,
            c: 0.19,
            d: 0.05,
            scramble: true,
        }
    }

    pub fn num_vertices(&self) -> usize {
        1usize << self.scale
    }

    pub fn num_edges(&self) -> usize {
        self.edge_factor as usize * self.num_vertices()
    }

    pub fn label(&self) -> String {
        format!("SC{}-{}", self.scale, self.edge_factor)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let sum = self.a + self.b + self.c + self.d;
        if (sum - 1.0).abs() > 1e-9 || [self.a, self.b, self.c, self.d].iter().any(|&p| p < 0.0) {
            return Err(GraphError::ProbabilitySum(sum));
        }
        if self.scale == 0 || self.scale > 31 {
            return Err(GraphError::InvalidParameter(format!(
                "scale must be in 1..=31, got {}",
                self.scale
            )));
        }
        Ok(())
    }
}

/// Generates `edge_factor * 2^scale` directed edges over `2^scale` vertices.
/// Output is a pure function of `(params, seed)`.
pub fn gen_rmat(params: &RmatParams, seed: u64) -> Result<Vec<Edge>, GraphError> {
    params.validate()?;
    let key = key_from_seed(seed);
    let mut rng = RngStream::new(key, 0);
    let (ab, abc) = (params.a + params.b, params.a + params.b + params.c);
    let mut edges = Vec::with_capacity(params.num_edges());
    for _ in 0..params.num_edges() {
        let (mut src, mut dst) = (0 as VertexId, 0 as VertexId);
        for _ in 0..params.scale {
            let r = rng.next_unit();
            let (sbit, dbit) = if r < params.a {
                (0, 0)
            } else if r < ab {
                (0, 1)
            } else if r < abc {
                (1, 0)
            } else {
                (1, 1)
            };
            src = (src << 1) | sbit;
            dst = (dst << 1) | dbit;
        }
        edges.push(Edge::new(src, dst));
    }
    if params.scramble {
        scramble_vertices(&mut edges, params.num_vertices(), seed);
    }
    Ok(edges)
}

/// Applies a seeded uniform permutation to every vertex id.
pub fn scramble_vertices(edges: &mut [Edge], num_vertices: usize, seed: u64) {
    let mut rng = RngStream::new(key_from_seed(seed), 1);
    let mut perm: Vec<VertexId> = (0..num_vertices as VertexId).collect();
    for i in (1..num_vertices).rev() {
        let j = ((rng.next_u64() as u128 * (i as u128 + 1)) >> 64) as usize;
        perm.swap(i, j);
    }
    for e in edges {
        e.src = perm[e.src as usize];
        e.dst = perm[e.dst as usize];
    }
}

/// Gives every edge a seeded weight drawn uniformly from `[1, 5)`.
pub fn assign_weights(edges: &mut [Edge], seed: u64) {
    let mut rng = RngStream::new(key_from_seed(seed), 2);
    for e in edges {
        e.weight = Some(1.0 + 4.0 * rng.next_unit());
    }
}
