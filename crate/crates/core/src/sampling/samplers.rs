use super::rng::{unit_f64, RngStream};
use super::SamplingError;
use crate::graph::{AliasRef, VertexId};

/// Unbiased index in `[0, degree)` by widening multiply.
#[inline]
pub fn sample_uniform(degree: u64, r: u64) -> Result<u64, SamplingError> {
    if degree == 0 {
        return Err(SamplingError::ZeroDegree);
    }
    Ok(((r as u128 * degree as u128) >> 64) as u64)
}

#[inline]
pub fn sample_alias(t: AliasRef<'_>, r1: u64, r2: u64) -> usize {
    t.sample(r1, r2)
}

/// Unnormalized second-order bias of stepping to `x`.
#[inline]
pub fn node2vec_weight(x: VertexId, prev: VertexId, x_adjacent_to_prev: bool, p: f64, q: f64) -> f64 {
    if x == prev {
        1.0 / p
    } else if x_adjacent_to_prev {
        1.0
    } else {
        1.0 / q
    }
}

pub fn node2vec_envelope(p: f64, q: f64) -> f64 {
    (1.0 / p).max(1.0).max(1.0 / q)
}

/// One rejection trial: propose with `r_idx`, accept with `r_acc`.
#[inline]
pub fn node2vec_trial(
    degree: u64,
    r_idx: u64,
    r_acc: u64,
    weight_of: impl Fn(u64) -> f64,
    envelope: f64,
) -> Option<u64> {
    let idx = sample_uniform(degree, r_idx).ok()?;
    (unit_f64(r_acc) * envelope < weight_of(idx)).then_some(idx)
}

/// Rejection-sampled Node2Vec step. Returns the local index and the number
/// of rejected proposals.
pub fn sample_node2vec_reject(
    prev: VertexId,
    curr_neighbors: &[VertexId],
    prev_adjacent: impl Fn(VertexId) -> bool,
    p: f64,
    q: f64,
    stream: &mut RngStream,
) -> Result<(usize, u32), SamplingError> {
    if curr_neighbors.is_empty() {
        return Err(SamplingError::ZeroDegree);
    }
    let envelope = node2vec_envelope(p, q);
    let weight_of = |i: u64| {
        let x = curr_neighbors[i as usize];
        node2vec_weight(x, prev, prev_adjacent(x), p, q)
    };
    let mut retries = 0;
    loop {
        let (r_idx, r_acc) = (stream.next_u64(), stream.next_u64());
        if let Some(i) = node2vec_trial(curr_neighbors.len() as u64, r_idx, r_acc, weight_of, envelope) {
            return Ok((i as usize, retries));
        }
        retries += 1;
    }
}

/// Single-slot weighted reservoir: candidate `i` replaces the choice with
/// probability `w_i / W_i`, where `W_i` is the running weight sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReservoirState {
    pub total: f64,
    pub chosen: Option<usize>,
}

impl ReservoirState {
    #[inline]
    pub fn offer(&mut self, index: usize, weight: f64, r: u64) {
        if weight <= 0.0 {
            return;
        }
        self.total += weight;
        if unit_f64(r) * self.total < weight {
            self.chosen = Some(index);
        }
    }
}

/// One draw is consumed per positive-weight candidate.
pub fn sample_reservoir_weighted(
    candidates: impl IntoIterator<Item = (usize, f64)>,
    stream: &mut RngStream,
) -> Result<usize, SamplingError> {
    let mut state = ReservoirState::default();
    for (i, w) in candidates {
        if w > 0.0 {
            state.offer(i, w, stream.next_u64());
        }
    }
    state.chosen.ok_or(SamplingError::AllZeroWeights)
}

/// Local indices of neighbors whose type equals `expected`.
pub fn filter_metapath(
    curr_neighbors: &[VertexId],
    vertex_types: Option<&[u32]>,
    expected: u32,
) -> Result<Vec<usize>, SamplingError> {
    let types = vertex_types.ok_or(SamplingError::MissingTypes)?;
    Ok(curr_neighbors
        .iter()
        .enumerate()
        .filter(|(_, &x)| types[x as usize] == expected)
        .map(|(i, _)| i)
        .collect())
}
