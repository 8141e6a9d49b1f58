//! Memory channels and the asynchronous access engine.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::sampling::RngStream;
use crate::walk::WalkTask;

/// Cycles between a response arriving and the task leaving the engine.
pub const PROXY_LATENCY: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemConfig {
    pub fixed_latency: u64,
    /// Responses land uniformly in `[0, jitter_window)` cycles after the
    /// fixed latency; per-transaction-id order is then restored.
    pub jitter_window: u64,
    /// Cycles between two accesses served by one channel.
    pub service_interval: u64,
    pub max_outstanding: usize,
    pub txn_ids: usize,
    pub meta_queue: usize,
}

impl Default for MemConfig {
    fn default() -> Self {
        Self {
            fixed_latency: 100,
            jitter_window: 16,
            service_interval: 1,
            max_outstanding: 128,
            txn_ids: 64,
            meta_queue: 512,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemRequest {
    pub engine: usize,
    pub seq: u64,
}

#[derive(Debug, Clone)]
pub struct MemoryChannel {
    id: u64,
    key: u64,
    queue: VecDeque<MemRequest>,
    next_free: u64,
    accesses: u64,
}

impl MemoryChannel {
    pub fn new(id: usize, key: u64) -> Self {
        Self {
            id: id as u64,
            key,
            queue: VecDeque::new(),
            next_free: 0,
            accesses: 0,
        }
    }

    pub fn submit(&mut self, req: MemRequest) {
        self.queue.push_back(req);
    }

    pub fn queued(&self) -> usize {
        self.queue.len()
    }

    pub fn accesses(&self) -> u64 {
        self.accesses
    }

    /// Serves at most one queued request; returns it with its response cycle.
    pub fn serve(&mut self, now: u64, cfg: &MemConfig) -> Option<(MemRequest, u64)> {
        if now < self.next_free {
            return None;
        }
        let req = self.queue.pop_front()?;
        self.next_free = now + cfg.service_interval.max(1);
        let r = RngStream::at(self.key, self.id, self.accesses).peek();
        let jitter = ((r as u128 * cfg.jitter_window as u128) >> 64) as u64;
        self.accesses += 1;
        Some((req, now + cfg.fixed_latency + jitter))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineStats {
    pub accepted: u64,
    pub retired: u64,
    pub max_outstanding_seen: usize,
}

#[derive(Debug, Clone)]
struct Slot {
    task: WalkTask,
    txn: usize,
    ready: Option<u64>,
}

/// Non-blocking access engine: issues one request per cycle while fewer than
/// `max_outstanding` are unanswered, and retires tasks in request order
/// through a reorder buffer.
#[derive(Debug, Clone)]
pub struct AsyncEngine {
    pub id: usize,
    cfg: MemConfig,
    slots: VecDeque<Slot>,
    front_seq: u64,
    next_seq: u64,
    unanswered: usize,
    arrivals: BinaryHeap<Reverse<u64>>,
    last_ready: Vec<u64>,
    pub stats: EngineStats,
}

impl AsyncEngine {
    pub fn new(id: usize, cfg: MemConfig) -> Self {
        Self {
            id,
            cfg,
            slots: VecDeque::new(),
            front_seq: 0,
            next_seq: 0,
            unanswered: 0,
            arrivals: BinaryHeap::new(),
            last_ready: vec![0; cfg.txn_ids.max(1)],
            stats: EngineStats::default(),
        }
    }

    /// Counts responses that arrived by `now` as answered.
    pub fn begin_cycle(&mut self, now: u64) {
        while self.arrivals.peek().is_some_and(|r| r.0 <= now) {
            self.arrivals.pop();
            self.unanswered -= 1;
        }
    }

    pub fn can_accept(&self) -> bool {
        self.unanswered < self.cfg.max_outstanding && self.slots.len() < self.cfg.meta_queue
    }

    /// Takes a task and returns the request to route to a channel.
    pub fn accept(&mut self, task: WalkTask) -> MemRequest {
        assert!(self.can_accept(), "engine accepted past its caps");
        let seq = self.next_seq;
        self.next_seq += 1;
        self.slots.push_back(Slot {
            task,
            txn: (seq % self.last_ready.len() as u64) as usize,
            ready: None,
        });
        self.unanswered += 1;
        assert!(self.unanswered <= self.cfg.max_outstanding);
        self.stats.max_outstanding_seen = self.stats.max_outstanding_seen.max(self.unanswered);
        self.stats.accepted += 1;
        MemRequest {
            engine: self.id,
            seq,
        }
    }

    /// Records the channel's response time for request `seq`.
    pub fn respond(&mut self, seq: u64, ready: u64) {
        let idx = (seq - self.front_seq) as usize;
        let slot = &mut self.slots[idx];
        // responses of one transaction id come back in request order
        let ready = ready.max(self.last_ready[slot.txn]);
        assert!(ready >= self.last_ready[slot.txn]);
        self.last_ready[slot.txn] = ready;
        slot.ready = Some(ready);
        self.arrivals.push(Reverse(ready));
    }

    pub fn can_retire(&self, now: u64) -> bool {
        self.slots
            .front()
            .and_then(|s| s.ready)
            .is_some_and(|r| r + PROXY_LATENCY <= now)
    }

    pub fn retire(&mut self) -> WalkTask {
        let slot = self.slots.pop_front().expect("retire with a ready slot");
        self.front_seq += 1;
        self.stats.retired += 1;
        slot.task
    }

    pub fn outstanding(&self) -> usize {
        self.unanswered
    }

    pub fn in_flight(&self) -> usize {
        self.slots.len()
    }

    pub fn tasks(&self) -> impl Iterator<Item = &WalkTask> {
        self.slots.iter().map(|s| &s.task)
    }
}
