use serde::{Deserialize, Serialize};

use super::WalkError;
use crate::graph::{RowPointerEntry, VertexId};
use crate::sampling::{AlgoKind, AlgoParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub query_id: u64,
    pub v_start: VertexId,
}

impl Query {
    pub fn new(query_id: u64, v_start: VertexId) -> Self {
        Self { query_id, v_start }
    }

    pub fn validate(&self, num_vertices: usize) -> Result<(), WalkError> {
        if (self.v_start as usize) < num_vertices {
            Ok(())
        } else {
            Err(WalkError::StartOutOfRange {
                query_id: self.query_id,
                vertex: self.v_start,
                num_vertices,
            })
        }
    }
}

/// Data attached to a task while it moves between pipeline stages.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageData {
    pub entry: Option<RowPointerEntry>,
    pub sampled: Option<u32>,
    /// Rejected proposals so far at this hop.
    pub retries: u32,
}

/// One hop of one walk. Everything needed to execute the hop travels with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkTask {
    pub query_id: u64,
    pub prev: VertexId,
    pub curr: VertexId,
    /// Hops sampled so far.
    pub hop: u32,
    /// MetaPath schema position of `curr`.
    pub payload: u32,
    pub stage: StageData,
}

pub const TASK_WORDS: usize = 8;

const SAMPLED_BITS: u32 = 24;
const RETRY_BITS: u32 = 24;

impl WalkTask {
    /// Packs the task into 512 bits.
    ///
    /// Layout: query id | prev,curr | hop,payload | entry (up to 4 words) |
    /// sampled:24, retries:24, entry words:3, has_sampled:1.
    pub fn encode(&self) -> [u64; TASK_WORDS] {
        let mut w = [0u64; TASK_WORDS];
        w[0] = self.query_id;
        w[1] = (self.prev as u64) << 32 | self.curr as u64;
        w[2] = (self.hop as u64) << 32 | self.payload as u64;
        let mut entry_words = 0u64;
        if let Some(e) = &self.stage.entry {
            let words = e.encode().expect("row pointer entry within bit budget");
            entry_words = words.len() as u64;
            w[3..3 + words.len()].copy_from_slice(&words);
        }
        let sampled = self.stage.sampled.unwrap_or(0) as u64;
        assert!(sampled >> SAMPLED_BITS == 0 && (self.stage.retries as u64) >> RETRY_BITS == 0);
        w[7] = sampled
            | (self.stage.retries as u64) << SAMPLED_BITS
            | entry_words << (SAMPLED_BITS + RETRY_BITS)
            | (self.stage.sampled.is_some() as u64) << (SAMPLED_BITS + RETRY_BITS + 3);
        w
    }

    pub fn decode(w: &[u64; TASK_WORDS]) -> Result<Self, WalkError> {
        let entry_words = ((w[7] >> (SAMPLED_BITS + RETRY_BITS)) & 0b111) as usize;
        let entry = match entry_words {
            0 => None,
            1 | 2 | 4 => Some(
                RowPointerEntry::decode(&w[3..3 + entry_words])
                    .map_err(|_| WalkError::BadEncoding(3))?,
            ),
            _ => return Err(WalkError::BadEncoding(7)),
        };
        let mask = |bits: u32| (1u64 << bits) - 1;
        Ok(Self {
            query_id: w[0],
            prev: (w[1] >> 32) as u32,
            curr: w[1] as u32,
            hop: (w[2] >> 32) as u32,
            payload: w[2] as u32,
            stage: StageData {
                entry,
                sampled: ((w[7] >> (SAMPLED_BITS + RETRY_BITS + 3)) & 1 == 1)
                    .then_some((w[7] & mask(SAMPLED_BITS)) as u32),
                retries: ((w[7] >> SAMPLED_BITS) & mask(RETRY_BITS)) as u32,
            },
        })
    }
}

/// Initial task: `prev = curr = v_start`, hop 0, schema position 0.
pub fn make_task(q: &Query) -> WalkTask {
    WalkTask {
        query_id: q.query_id,
        prev: q.v_start,
        curr: q.v_start,
        hop: 0,
        payload: 0,
        stage: StageData::default(),
    }
}

/// Moves the task to `next`, clearing per-hop stage data.
pub fn advance(t: &WalkTask, next: VertexId, params: &AlgoParams) -> WalkTask {
    let payload = if params.kind == AlgoKind::MetaPath && !params.schema.is_empty() {
        (t.payload + 1) % params.schema.len() as u32
    } else {
        t.payload
    };
    WalkTask {
        query_id: t.query_id,
        prev: t.curr,
        curr: next,
        hop: t.hop + 1,
        payload,
        stage: StageData::default(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Continue,
    /// Sample this hop, then finish (the hop cap is reached).
    LastHop,
    /// Finish without sampling: dead end, teleport, or no matching neighbor.
    Stop,
}

/// `degree` is the candidate count: the filtered count for MetaPath. The
/// teleport draw `r` applies from the second hop on, so PPR walks average
/// `1 / alpha` hops.
pub fn termination(t: &WalkTask, degree: u64, params: &AlgoParams, r: f64) -> Termination {
    if degree == 0 || (params.kind == AlgoKind::Ppr && t.hop > 0 && r < params.alpha) {
        Termination::Stop
    } else if t.hop + 1 >= params.max_len {
        Termination::LastHop
    } else {
        Termination::Continue
    }
}

pub fn should_terminate(t: &WalkTask, degree: u64, params: &AlgoParams, r: f64) -> bool {
    termination(t, degree, params, r) != Termination::Continue
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RpAux;
    use proptest::prelude::*;

    #[test]
    fn make_and_advance() {
        let p = AlgoParams::urw(80);
        let t = make_task(&Query::new(9, 5));
        assert_eq!((t.curr, t.query_id, t.hop), (5, 9, 0));
        let t = advance(&t, 2, &p);
        assert_eq!((t.curr, t.query_id, t.hop), (2, 9, 1));
    }

    #[test]
    fn second_order_rotation() {
        let p = AlgoParams::node2vec(AlgoKind::Node2VecReject, 2.0, 0.5, 80);
        let t = make_task(&Query::new(1, 3));
        assert_eq!((t.prev, t.curr), (3, 3));
        let t = WalkTask {
            prev: 1,
            curr: 4,
            hop: 3,
            ..t
        };
        let t = advance(&t, 7, &p);
        assert_eq!((t.prev, t.curr, t.hop), (4, 7, 4));
    }

    #[test]
    fn metapath_position_cycles() {
        let p = AlgoParams::metapath(vec![0, 1], 80);
        let t = make_task(&Query::new(0, 0));
        assert_eq!(t.payload, 0);
        let t = advance(&t, 1, &p);
        assert_eq!(t.payload, 1);
        assert_eq!(advance(&t, 2, &p).payload, 0);
    }

    #[test]
    fn termination_rules() {
        let p = AlgoParams::urw(80);
        let mut t = make_task(&Query::new(0, 0));
        t.hop = 79;
        assert!(should_terminate(&t, 3, &p, 0.5));
        assert_eq!(termination(&t, 3, &p, 0.5), Termination::LastHop);
        t.hop = 3;
        assert!(should_terminate(&t, 0, &p, 0.5));
        assert!(!should_terminate(&t, 3, &p, 0.0));
        let ppr = AlgoParams::ppr(0.15, 80);
        assert!(should_terminate(&t, 3, &ppr, 0.1));
        assert!(!should_terminate(&t, 3, &ppr, 0.2));
        t.hop = 0;
        assert!(!should_terminate(&t, 3, &ppr, 0.1));
    }

    fn arb_task() -> impl Strategy<Value = WalkTask> {
        let entry = prop_oneof![
            Just(None),
            (0u32..64, 0u64..1 << 34, 0u32..1 << 24).prop_map(|(c, s, d)| Some(RowPointerEntry {
                channel: c,
                cl_start: s,
                degree: d,
                aux: RpAux::None
            })),
            (0u32..64, 0u64..1 << 34, 0u32..1 << 24, any::<u64>()).prop_map(|(c, s, d, tot)| Some(
                RowPointerEntry {
                    channel: c,
                    cl_start: s,
                    degree: d,
                    aux: RpAux::Alias {
                        alias_ref: s,
                        alias_size: d,
                        alias_total: tot
                    }
                }
            )),
        ];
        (
            any::<u64>(),
            any::<u32>(),
            any::<u32>(),
            any::<u32>(),
            any::<u32>(),
            entry,
            prop::option::of(0u32..1 << 24),
            0u32..1 << 24,
        )
            .prop_map(|(q, prev, curr, hop, payload, entry, sampled, retries)| WalkTask {
                query_id: q,
                prev,
                curr,
                hop,
                payload,
                stage: StageData {
                    entry,
                    sampled,
                    retries,
                },
            })
    }

    proptest! {
        #[test]
        fn task_fits_512_bits(t in arb_task()) {
            let w = t.encode();
            prop_assert_eq!(std::mem::size_of_val(&w) * 8, 512);
            prop_assert_eq!(WalkTask::decode(&w).unwrap(), t);
        }

        #[test]
        fn advance_is_pure(t in arb_task(), next in any::<u32>()) {
            let p = AlgoParams::metapath(vec![1, 2, 3], 80);
            let t = WalkTask { payload: t.payload % 3, ..t };
            prop_assume!(t.hop < u32::MAX);
            prop_assert_eq!(advance(&t, next, &p), advance(&t, next, &p));
        }
    }
}
