//! 1-to-2 dispatch and 2-to-1 merge cells with not-last-served alternation.

use serde::{Deserialize, Serialize};

use crate::sim::FifoChannel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispatchDecision {
    WriteOut1,
    WriteOut2,
    BlockOnOut1,
    BlockOnOut2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeDecision {
    TakeIn1,
    TakeIn2,
    Idle,
}

/// `last_selection` is the LSB, the out2 full flag the MSB.
pub fn build_scode_dispatch(last_selection: bool, out1_full: bool, out2_full: bool) -> u8 {
    (out2_full as u8) << 2 | (out1_full as u8) << 1 | last_selection as u8
}

pub fn dispatch_decide(code: u8) -> DispatchDecision {
    use DispatchDecision::*;
    match code & 0b111 {
        0b001 | 0b100 | 0b101 => WriteOut1,
        0b000 | 0b010 | 0b011 => WriteOut2,
        0b111 => BlockOnOut1,
        0b110 => BlockOnOut2,
        _ => unreachable!(),
    }
}

pub fn build_scode_merge(last_selection: bool, in1_empty: bool, in2_empty: bool) -> u8 {
    (in2_empty as u8) << 2 | (in1_empty as u8) << 1 | last_selection as u8
}

pub fn merge_decide(code: u8) -> MergeDecision {
    use MergeDecision::*;
    match code & 0b111 {
        0b110 | 0b111 => Idle,
        0b001 | 0b100 | 0b101 => TakeIn1,
        0b000 | 0b010 | 0b011 => TakeIn2,
        _ => unreachable!(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellStats {
    pub side1: u64,
    pub side2: u64,
    pub blocked_cycles: u64,
    /// Consecutive picks of the same side while both sides were available.
    pub repeats: u64,
}

/// `last_selection`: false after serving side 1, true after side 2.
#[derive(Debug, Clone, Default)]
pub struct DispatchCell<T> {
    pub last_selection: bool,
    held: Option<T>,
    pub stats: CellStats,
}

impl<T> DispatchCell<T> {
    pub fn new() -> Self {
        Self {
            last_selection: false,
            held: None,
            stats: CellStats::default(),
        }
    }

    pub fn is_holding(&self) -> bool {
        self.held.is_some()
    }

    fn write(&mut self, task: T, to_out2: bool, out1: &mut FifoChannel<T>, out2: &mut FifoChannel<T>) {
        if to_out2 {
            out2.push(task);
            self.stats.side2 += 1;
        } else {
            out1.push(task);
            self.stats.side1 += 1;
        }
        self.last_selection = to_out2;
    }

    /// One cycle. Returns the side written (`Some(false)` = out1), if any.
    pub fn step(
        &mut self,
        input: &mut FifoChannel<T>,
        out1: &mut FifoChannel<T>,
        out2: &mut FifoChannel<T>,
    ) -> Option<bool> {
        // a blocked task is re-decided every cycle, so it leaves by whichever side frees first
        let task = match self.held.take() {
            Some(t) => t,
            None if input.can_pop() => input.pop(),
            None => return None,
        };
        let (f1, f2) = (out1.is_full(), out2.is_full());
        let before = self.last_selection;
        match dispatch_decide(build_scode_dispatch(self.last_selection, f1, f2)) {
            DispatchDecision::WriteOut1 => {
                if !f1 && !f2 && !before && self.stats.side1 + self.stats.side2 > 0 {
                    self.stats.repeats += 1;
                }
                self.write(task, false, out1, out2);
                Some(false)
            }
            DispatchDecision::WriteOut2 => {
                if !f1 && !f2 && before {
                    self.stats.repeats += 1;
                }
                self.write(task, true, out1, out2);
                Some(true)
            }
            DispatchDecision::BlockOnOut1 | DispatchDecision::BlockOnOut2 => {
                self.held = Some(task);
                self.stats.blocked_cycles += 1;
                None
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MergeCell {
    pub last_selection: bool,
    pub stats: CellStats,
}

impl MergeCell {
    pub fn new() -> Self {
        Self::default()
    }

    /// Like `step`, but `in1` wins whenever it holds a task.
    pub fn step_priority<T>(
        &mut self,
        in1: &mut FifoChannel<T>,
        in2: &mut FifoChannel<T>,
        out: &mut FifoChannel<T>,
    ) -> Option<bool> {
        if out.is_full() {
            if in1.can_pop() || in2.can_pop() {
                self.stats.blocked_cycles += 1;
            }
            return None;
        }
        let taken = if in1.can_pop() {
            out.push(in1.pop());
            self.stats.side1 += 1;
            false
        } else if in2.can_pop() {
            out.push(in2.pop());
            self.stats.side2 += 1;
            true
        } else {
            return None;
        };
        self.last_selection = taken;
        Some(taken)
    }

    /// One cycle; reads only when the output can accept. Returns the side taken.
    pub fn step<T>(
        &mut self,
        in1: &mut FifoChannel<T>,
        in2: &mut FifoChannel<T>,
        out: &mut FifoChannel<T>,
    ) -> Option<bool> {
        if out.is_full() {
            if in1.can_pop() || in2.can_pop() {
                self.stats.blocked_cycles += 1;
            }
            return None;
        }
        let (e1, e2) = (in1.is_empty(), in2.is_empty());
        let before = self.last_selection;
        let taken = match merge_decide(build_scode_merge(self.last_selection, e1, e2)) {
            MergeDecision::Idle => return None,
            MergeDecision::TakeIn1 => {
                if !e1 && !e2 && !before && self.stats.side1 + self.stats.side2 > 0 {
                    self.stats.repeats += 1;
                }
                out.push(in1.pop());
                self.stats.side1 += 1;
                false
            }
            MergeDecision::TakeIn2 => {
                if !e1 && !e2 && before {
                    self.stats.repeats += 1;
                }
                out.push(in2.pop());
                self.stats.side2 += 1;
                true
            }
        };
        self.last_selection = taken;
        Some(taken)
    }
}
