//! Bounded FIFO with registered status signals.
//!
//! The consumer sees the occupancy latched at the start of the cycle, so a
//! task pushed in cycle `t` can be popped at `t + 1` at the earliest. The
//! producer's full signal lags further: pops are credited back only after
//! `feedback_delay` cycles, modelling the round trip of a credit signal.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct FifoChannel<T> {
    buf: VecDeque<T>,
    capacity: usize,
    feedback_delay: usize,
    occ_start: usize,
    pushed: usize,
    popped: usize,
    /// Pops of the last `feedback_delay - 1` cycles, oldest first.
    pop_history: VecDeque<usize>,
    history_sum: usize,
}

impl<T> FifoChannel<T> {
    pub fn new(capacity: usize) -> Self {
        Self::with_feedback_delay(capacity, 1)
    }

    pub fn with_feedback_delay(capacity: usize, feedback_delay: usize) -> Self {
        assert!(capacity >= 1, "FIFO capacity must be positive");
        Self {
            buf: VecDeque::with_capacity(capacity.min(1 << 16)),
            capacity,
            feedback_delay: feedback_delay.max(1),
            occ_start: 0,
            pushed: 0,
            popped: 0,
            pop_history: VecDeque::new(),
            history_sum: 0,
        }
    }

    /// Latches status signals; call once per cycle before any unit runs.
    pub fn begin_cycle(&mut self) {
        if self.feedback_delay > 1 {
            self.pop_history.push_back(self.popped);
            self.history_sum += self.popped;
            if self.pop_history.len() > self.feedback_delay - 1 {
                self.history_sum -= self.pop_history.pop_front().unwrap_or(0);
            }
        }
        self.occ_start = self.buf.len();
        self.pushed = 0;
        self.popped = 0;
    }

    #[inline]
    pub fn can_pop(&self) -> bool {
        self.occ_start > self.popped
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        !self.can_pop()
    }

    /// Producer-side view, including not-yet-credited pops.
    #[inline]
    pub fn can_push(&self) -> bool {
        self.occ_start + self.history_sum + self.pushed < self.capacity
    }

    #[inline]
    pub fn is_full(&self) -> bool {
        !self.can_push()
    }

    pub fn push(&mut self, item: T) {
        assert!(self.can_push(), "push into a full FIFO");
        self.pushed += 1;
        self.buf.push_back(item);
    }

    pub fn pop(&mut self) -> T {
        assert!(self.can_pop(), "pop from an empty FIFO");
        self.popped += 1;
        self.buf.pop_front().expect("occupancy tracks contents")
    }

    pub fn peek(&self) -> Option<&T> {
        if self.can_pop() {
            self.buf.front()
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn feedback_delay(&self) -> usize {
        self.feedback_delay
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.buf.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn push_visible_next_cycle() {
        let mut f = FifoChannel::new(2);
        f.begin_cycle();
        assert!(f.is_empty());
        f.push(1);
        assert!(f.is_empty());
        f.begin_cycle();
        assert_eq!(f.pop(), 1);
    }

    #[test]
    fn full_is_registered() {
        let mut f = FifoChannel::new(1);
        f.begin_cycle();
        f.push(1);
        assert!(f.is_full());
        f.begin_cycle();
        f.pop();
        // the pop is not seen by the producer until the next cycle
        assert!(f.is_full());
        f.begin_cycle();
        assert!(f.can_push());
    }

    #[test]
    fn credit_delay() {
        let mut f = FifoChannel::with_feedback_delay(1, 3);
        f.begin_cycle();
        f.push(0);
        f.begin_cycle();
        f.pop();
        f.begin_cycle();
        assert!(f.is_full());
        f.begin_cycle();
        assert!(f.is_full());
        f.begin_cycle();
        assert!(f.can_push());
    }

    #[test]
    #[should_panic(expected = "full FIFO")]
    fn overflow_panics() {
        let mut f = FifoChannel::new(1);
        f.begin_cycle();
        f.push(1);
        f.push(2);
    }

    proptest! {
        #[test]
        fn order_and_bounds(ops in prop::collection::vec((any::<bool>(), any::<bool>()), 1..400),
                            cap in 1usize..6, delay in 1usize..5) {
            let mut f = FifoChannel::with_feedback_delay(cap, delay);
            let (mut next_in, mut next_out) = (0u32, 0u32);
            for (push, pop) in ops {
                f.begin_cycle();
                if pop && f.can_pop() {
                    prop_assert_eq!(f.pop(), next_out);
                    next_out += 1;
                }
                if push && f.can_push() {
                    f.push(next_in);
                    next_in += 1;
                }
                prop_assert!(f.len() <= cap);
            }
        }
    }
}
