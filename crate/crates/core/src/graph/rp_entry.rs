//! Channel-tagged row-pointer entries in 64-, 128- and 256-bit classes.
//!
//! Word 0 (all classes): `channel:6 | cl_start:34 | degree:24`, channel in the
//! high bits. 128-bit entries add `weight_ref:40` in word 1. 256-bit entries
//! add `alias_ref:40 | alias_size:24` in word 1 and the alias total in word 2;
//! word 3 is reserved.

use serde::{Deserialize, Serialize};

use super::GraphError;
use crate::sampling::AlgoKind;

pub const CHANNEL_BITS: u32 = 6;
pub const CL_START_BITS: u32 = 34;
pub const DEGREE_BITS: u32 = 24;
pub const REF_BITS: u32 = 40;
pub const ALIAS_SIZE_BITS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntryWidth {
    W64,
    W128,
    W256,
}

impl EntryWidth {
    pub fn bits(self) -> u32 {
        match self {
            EntryWidth::W64 => 64,
            EntryWidth::W128 => 128,
            EntryWidth::W256 => 256,
        }
    }

    pub fn words(self) -> usize {
        self.bits() as usize / 64
    }

    pub fn bytes(self) -> u64 {
        self.bits() as u64 / 8
    }

    pub fn for_algo(kind: AlgoKind) -> Self {
        match kind {
            AlgoKind::Urw | AlgoKind::Ppr | AlgoKind::Node2VecReject => EntryWidth::W64,
            AlgoKind::Node2VecReservoir | AlgoKind::MetaPath => EntryWidth::W128,
            AlgoKind::DeepWalk => EntryWidth::W256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RpAux {
    None,
    WeightRef(u64),
    Alias {
        alias_ref: u64,
        alias_size: u32,
        alias_total: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RowPointerEntry {
    pub channel: u32,
    pub cl_start: u64,
    pub degree: u32,
    pub aux: RpAux,
}

fn check(field: &'static str, value: u64, bits: u32) -> Result<u64, GraphError> {
    if value >> bits != 0 {
        Err(GraphError::FieldOverflow { field, value, bits })
    } else {
        Ok(value)
    }
}

fn mask(bits: u32) -> u64 {
    (1u64 << bits) - 1
}

impl RowPointerEntry {
    pub fn width(&self) -> EntryWidth {
        match self.aux {
            RpAux::None => EntryWidth::W64,
            RpAux::WeightRef(_) => EntryWidth::W128,
            RpAux::Alias { .. } => EntryWidth::W256,
        }
    }

    pub fn encode(&self) -> Result<Vec<u64>, GraphError> {
        let w0 = check("channel", self.channel as u64, CHANNEL_BITS)?
            << (CL_START_BITS + DEGREE_BITS)
            | check("cl_start", self.cl_start, CL_START_BITS)? << DEGREE_BITS
            | check("degree", self.degree as u64, DEGREE_BITS)?;
        Ok(match self.aux {
            RpAux::None => vec![w0],
            RpAux::WeightRef(r) => vec![w0, check("weight_ref", r, REF_BITS)?],
            RpAux::Alias {
                alias_ref,
                alias_size,
                alias_total,
            } => vec![
                w0,
                check("alias_ref", alias_ref, REF_BITS)? << ALIAS_SIZE_BITS
                    | check("alias_size", alias_size as u64, ALIAS_SIZE_BITS)?,
                alias_total,
                0,
            ],
        })
    }

    pub fn decode(words: &[u64]) -> Result<Self, GraphError> {
        let w0 = *words
            .first()
            .ok_or_else(|| GraphError::Malformed("empty row pointer entry".into()))?;
        let aux = match words.len() {
            1 => RpAux::None,
            2 => {
                check("weight_ref", words[1], REF_BITS)?;
                RpAux::WeightRef(words[1])
            }
            4 => RpAux::Alias {
                alias_ref: words[1] >> ALIAS_SIZE_BITS,
                alias_size: (words[1] & mask(ALIAS_SIZE_BITS)) as u32,
                alias_total: words[2],
            },
            n => {
                return Err(GraphError::Malformed(format!(
                    "row pointer entry of {n} words"
                )))
            }
        };
        Ok(Self {
            channel: (w0 >> (CL_START_BITS + DEGREE_BITS)) as u32,
            cl_start: (w0 >> DEGREE_BITS) & mask(CL_START_BITS),
            degree: (w0 & mask(DEGREE_BITS)) as u32,
            aux,
        })
    }
}
