use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use super::WalkError;
use crate::graph::VertexId;

#[derive(Debug, Default)]
struct Pending {
    /// Next hop that has not been flushed or buffered in order.
    next_hop: u32,
    ready: Vec<VertexId>,
    early: BTreeMap<u32, VertexId>,
}

/// Reassembles per-query paths from hops that may arrive out of order, and
/// flushes them in hop order every `granularity` contiguous elements.
#[derive(Debug)]
pub struct PathSink {
    granularity: usize,
    pending: HashMap<u64, Pending>,
    paths: BTreeMap<u64, Vec<VertexId>>,
    flushes: u64,
}

impl PathSink {
    pub fn new(granularity: usize) -> Self {
        Self {
            granularity: granularity.max(1),
            pending: HashMap::new(),
            paths: BTreeMap::new(),
            flushes: 0,
        }
    }

    pub fn collect(&mut self, query_id: u64, hop: u32, vertex: VertexId) -> Result<(), WalkError> {
        let flushed = self.paths.get(&query_id).map_or(0, |v| v.len() as u32);
        let p = self.pending.entry(query_id).or_insert_with(|| Pending {
            next_hop: flushed,
            ..Pending::default()
        });
        if hop < p.next_hop + p.ready.len() as u32 || p.early.contains_key(&hop) {
            return Err(WalkError::DuplicateHop { query_id, hop });
        }
        if hop == p.next_hop + p.ready.len() as u32 {
            p.ready.push(vertex);
            while let Some(v) = p.early.remove(&(p.next_hop + p.ready.len() as u32)) {
                p.ready.push(v);
            }
        } else {
            p.early.insert(hop, vertex);
        }
        if p.ready.len() >= self.granularity {
            Self::flush(&mut self.paths, &mut self.flushes, query_id, p);
        }
        Ok(())
    }

    fn flush(paths: &mut BTreeMap<u64, Vec<VertexId>>, flushes: &mut u64, query_id: u64, p: &mut Pending) {
        if p.ready.is_empty() {
            return;
        }
        p.next_hop += p.ready.len() as u32;
        paths.entry(query_id).or_default().append(&mut p.ready);
        *flushes += 1;
    }

    /// Called when the walk terminates; flushes what is left.
    pub fn finish(&mut self, query_id: u64) -> Result<(), WalkError> {
        let Some(mut p) = self.pending.remove(&query_id) else {
            return Ok(());
        };
        if let Some((&hop, _)) = p.early.iter().next() {
            return Err(WalkError::IncompletePath {
                query_id,
                missing_hop: hop.min(p.next_hop + p.ready.len() as u32),
            });
        }
        Self::flush(&mut self.paths, &mut self.flushes, query_id, &mut p);
        Ok(())
    }

    pub fn flush_count(&self) -> u64 {
        self.flushes
    }

    /// Flushed elements of one query, in hop order.
    pub fn path(&self, query_id: u64) -> Option<&[VertexId]> {
        self.paths.get(&query_id).map(Vec::as_slice)
    }

    pub fn into_paths(self) -> BTreeMap<u64, Vec<VertexId>> {
        self.paths
    }
}

pub fn format_path_line(query_id: u64, path: &[VertexId]) -> String {
    let mut s = format!("{query_id}:");
    for v in path {
        s.push(' ');
        s.push_str(&v.to_string());
    }
    s
}

/// One line per query: `query_id: v0 v1 v2 ...`.
pub fn write_paths<W: Write>(mut out: W, paths: &BTreeMap<u64, Vec<VertexId>>) -> io::Result<()> {
    for (q, p) in paths {
        writeln!(out, "{}", format_path_line(*q, p))?;
    }
    Ok(())
}
