use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SamplingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgoKind {
    Urw,
    Ppr,
    DeepWalk,
    Node2VecReject,
    Node2VecReservoir,
    MetaPath,
}

impl AlgoKind {
    pub const ALL: [AlgoKind; 6] = [
        AlgoKind::Urw,
        AlgoKind::Ppr,
        AlgoKind::DeepWalk,
        AlgoKind::Node2VecReject,
        AlgoKind::Node2VecReservoir,
        AlgoKind::MetaPath,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgoKind::Urw => "urw",
            AlgoKind::Ppr => "ppr",
            AlgoKind::DeepWalk => "deepwalk",
            AlgoKind::Node2VecReject => "node2vec-reject",
            AlgoKind::Node2VecReservoir => "node2vec-reservoir",
            AlgoKind::MetaPath => "metapath",
        }
    }

    /// Walks whose next hop depends on the previous vertex too.
    pub fn is_second_order(self) -> bool {
        matches!(self, AlgoKind::Node2VecReject | AlgoKind::Node2VecReservoir)
    }
}

impl fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgoKind {
    type Err = SamplingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match key.as_str() {
            "urw" | "uniform" => AlgoKind::Urw,
            "ppr" => AlgoKind::Ppr,
            "deepwalk" | "deep-walk" => AlgoKind::DeepWalk,
            "node2vec" | "node2vec-reject" => AlgoKind::Node2VecReject,
            "node2vec-reservoir" => AlgoKind::Node2VecReservoir,
            "metapath" | "meta-path" => AlgoKind::MetaPath,
            _ => return Err(SamplingError::UnknownAlgo(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoParams {
    pub kind: AlgoKind,
    /// Teleport (stop) probability for PPR.
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    /// Cyclic vertex-type schema for MetaPath.
    pub schema: Vec<u32>,
    /// Maximum number of sampled hops per walk.
    pub max_len: u32,
}

impl AlgoParams {
    pub fn new(kind: AlgoKind) -> Self {
        Self {
            kind,
            alpha: 0.15,
            p: 2.0,
            q: 0.5,
            schema: if kind == AlgoKind::MetaPath {
                vec![0, 1]
            } else {
                Vec::new()
            },
            max_len: 80,
        }
    }

    pub fn urw(max_len: u32) -> Self {
        Self::new(AlgoKind::Urw).with_max_len(max_len)
    }

    pub fn ppr(alpha: f64, max_len: u32) -> Self {
        Self {
            alpha,
            ..Self::new(AlgoKind::Ppr).with_max_len(max_len)
        }
    }

    pub fn node2vec(kind: AlgoKind, p: f64, q: f64, max_len: u32) -> Self {
        Self {
            p,
            q,
            ..Self::new(kind).with_max_len(max_len)
        }
    }

    pub fn metapath(schema: Vec<u32>, max_len: u32) -> Self {
        Self {
            schema,
            ..Self::new(AlgoKind::MetaPath).with_max_len(max_len)
        }
    }

    pub fn with_max_len(mut self, max_len: u32) -> Self {
        self.max_len = max_len;
        self
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        let bad = |m: String| Err(SamplingError::InvalidParams(m));
        if self.max_len < 1 {
            return bad("max_len must be at least 1".into());
        }
        if self.kind == AlgoKind::Ppr && !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if self.kind.is_second_order()
            && !(self.p > 0.0 && self.q > 0.0 && self.p.is_finite() && self.q.is_finite())
        {
            return bad(format!("p and q must be positive, got {} and {}", self.p, self.q));
        }
        if self.kind == AlgoKind::MetaPath && self.schema.is_empty() {
            return bad("metapath schema must not be empty".into());
        }
        Ok(())
    }
}
