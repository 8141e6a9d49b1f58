//! Bounded per-cycle event log.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub cycle: u64,
    pub unit: String,
    pub event: &'static str,
    pub query_id: u64,
    pub hop: u32,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            self.cycle, self.unit, self.event, self.query_id, self.hop
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct TraceLog {
    limit: usize,
    events: Vec<TraceEvent>,
    dropped: u64,
}

impl TraceLog {
    /// A limit of 0 disables tracing.
    pub fn new(limit: usize) -> Self {
        Self {
            limit,
            events: Vec::new(),
            dropped: 0,
        }
    }

    #[inline]
    pub fn enabled(&self) -> bool {
        self.limit > 0
    }

    pub fn record(&mut self, cycle: u64, unit: impl FnOnce() -> String, event: &'static str, query_id: u64, hop: u32) {
        if !self.enabled() {
            return;
        }
        if self.events.len() >= self.limit {
            self.dropped += 1;
            return;
        }
        self.events.push(TraceEvent {
            cycle,
            unit: unit(),
            event,
            query_id,
            hop,
        });
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn lines(&self) -> Vec<String> {
        self.events.iter().map(ToString::to_string).collect()
    }
}

/// Creates a log sized by `limit`; 0 disables it.
pub fn attach_trace(limit: usize) -> TraceLog {
    TraceLog::new(limit)
}
