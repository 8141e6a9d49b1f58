//! Multistage N-to-N balancer built from dispatch and merge cells.
//!
//! Stage `s` has one dispatcher and one merger per lane. Dispatcher `i`
//! feeds merger `i` through out1 and merger `i ^ (1 << s)` through out2, so
//! after `log2 N` stages every input reaches every output.

use super::cells::{DispatchCell, MergeCell};
use super::SchedulerError;
use crate::sim::FifoChannel;

#[derive(Debug, Clone)]
pub struct Butterfly<T> {
    n: usize,
    /// `stage_in[0]` are the network inputs.
    stage_in: Vec<Vec<FifoChannel<T>>>,
    out1: Vec<Vec<FifoChannel<T>>>,
    out2: Vec<Vec<FifoChannel<T>>>,
    outputs: Vec<FifoChannel<T>>,
    dispatchers: Vec<Vec<DispatchCell<T>>>,
    mergers: Vec<Vec<MergeCell>>,
    accepted: Vec<u64>,
    delivered: Vec<u64>,
}

fn fifos<T>(n: usize, depth: usize, delay: usize) -> Vec<FifoChannel<T>> {
    (0..n)
        .map(|_| FifoChannel::with_feedback_delay(depth, delay))
        .collect()
}

impl<T> Butterfly<T> {
    /// `output_delay` is the credit delay seen by the last merger stage.
    pub fn new(
        n: usize,
        internal_depth: usize,
        output_depth: usize,
        output_delay: usize,
    ) -> Result<Self, SchedulerError> {
        if n == 0 || !n.is_power_of_two() {
            return Err(SchedulerError::NotPowerOfTwo(n));
        }
        let stages = n.trailing_zeros() as usize;
        Ok(Self {
            n,
            stage_in: (0..stages.max(1)).map(|_| fifos(n, internal_depth, 1)).collect(),
            out1: (0..stages).map(|_| fifos(n, internal_depth, 1)).collect(),
            out2: (0..stages).map(|_| fifos(n, internal_depth, 1)).collect(),
            outputs: fifos(n, output_depth, output_delay),
            dispatchers: (0..stages)
                .map(|_| (0..n).map(|_| DispatchCell::new()).collect())
                .collect(),
            mergers: (0..stages)
                .map(|_| (0..n).map(|_| MergeCell::new()).collect())
                .collect(),
            accepted: vec![0; n],
            delivered: vec![0; n],
        })
    }

    pub fn lanes(&self) -> usize {
        self.n
    }

    pub fn stages(&self) -> usize {
        self.dispatchers.len()
    }

    /// Cycles from an input FIFO to an output FIFO when nothing blocks.
    pub fn latency(&self) -> usize {
        (2 * self.stages()).max(1)
    }

    pub fn input(&mut self, lane: usize) -> &mut FifoChannel<T> {
        &mut self.stage_in[0][lane]
    }

    pub fn input_ref(&self, lane: usize) -> &FifoChannel<T> {
        &self.stage_in[0][lane]
    }

    pub fn output(&mut self, lane: usize) -> &mut FifoChannel<T> {
        &mut self.outputs[lane]
    }

    pub fn output_ref(&self, lane: usize) -> &FifoChannel<T> {
        &self.outputs[lane]
    }

    /// Tasks taken from each input FIFO so far.
    pub fn accepted(&self) -> &[u64] {
        &self.accepted
    }

    /// Tasks written to each output FIFO so far.
    pub fn delivered(&self) -> &[u64] {
        &self.delivered
    }

    pub fn dispatchers(&self) -> impl Iterator<Item = &DispatchCell<T>> {
        self.dispatchers.iter().flatten()
    }

    pub fn mergers(&self) -> impl Iterator<Item = &MergeCell> {
        self.mergers.iter().flatten()
    }

    /// Tasks held anywhere in the network, outputs included.
    pub fn occupancy(&self) -> usize {
        let fifo: usize = self
            .stage_in
            .iter()
            .chain(&self.out1)
            .chain(&self.out2)
            .flatten()
            .chain(&self.outputs)
            .map(FifoChannel::len)
            .sum();
        fifo + self.dispatchers().filter(|d| d.is_holding()).count()
    }

    pub fn begin_cycle(&mut self) {
        for f in self
            .stage_in
            .iter_mut()
            .chain(&mut self.out1)
            .chain(&mut self.out2)
            .flatten()
            .chain(&mut self.outputs)
        {
            f.begin_cycle();
        }
    }

    pub fn step(&mut self) {
        let stages = self.stages();
        if stages == 0 {
            let (input, out) = (&mut self.stage_in[0][0], &mut self.outputs[0]);
            if input.can_pop() && out.can_push() {
                out.push(input.pop());
                self.accepted[0] += 1;
                self.delivered[0] += 1;
            }
            return;
        }
        for s in 0..stages {
            for i in 0..self.n {
                let before = self.stage_in[s][i].len();
                self.dispatchers[s][i].step(
                    &mut self.stage_in[s][i],
                    &mut self.out1[s][i],
                    &mut self.out2[s][i],
                );
                if s == 0 && self.stage_in[s][i].len() < before {
                    self.accepted[i] += 1;
                }
            }
            let bit = 1 << s;
            let (_, tail) = self.stage_in.split_at_mut(s + 1);
            for i in 0..self.n {
                let out = if s + 1 == stages {
                    &mut self.outputs[i]
                } else {
                    &mut tail[0][i]
                };
                let (o1, o2) = (&mut self.out1[s], &mut self.out2[s]);
                // in1 and in2 live in different vectors, so both borrows are disjoint
                let taken = self.mergers[s][i].step(&mut o1[i], &mut o2[i ^ bit], out);
                if taken.is_some() && s + 1 == stages {
                    self.delivered[i] += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_until_drained(b: &mut Butterfly<(usize, usize)>, sent: usize) -> Vec<(usize, usize)> {
        let mut got = Vec::new();
        for _ in 0..1000 {
            b.begin_cycle();
            for j in 0..b.lanes() {
                if b.output(j).can_pop() {
                    let (src, _) = b.output(j).pop();
                    got.push((src, j));
                }
            }
            b.step();
            if got.len() == sent {
                break;
            }
        }
        got
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Butterfly::<u32>::new(3, 4, 4, 1).is_err());
        assert!(Butterfly::<u32>::new(0, 4, 4, 1).is_err());
    }

    #[test]
    fn stage_counts() {
        assert_eq!(Butterfly::<u32>::new(1, 4, 4, 1).unwrap().stages(), 0);
        assert_eq!(Butterfly::<u32>::new(2, 4, 4, 1).unwrap().stages(), 1);
        assert_eq!(Butterfly::<u32>::new(4, 4, 4, 1).unwrap().stages(), 2);
        let b = Butterfly::<u32>::new(16, 4, 4, 1).unwrap();
        assert_eq!(b.stages(), 4);
        assert!(2 * b.latency() <= 16);
    }

    #[test]
    fn every_input_reaches_every_output() {
        for n in [2usize, 4, 8, 16] {
            let mut reach = vec![vec![false; n]; n];
            // bit s of k presets stage s: set means "out2 served last", so the cell stays
            for src in 0..n {
                for k in 0..n {
                    let mut b = Butterfly::new(n, 4, 4, 1).unwrap();
                    for (s, stage) in b.dispatchers.iter_mut().enumerate() {
                        for d in stage {
                            d.last_selection = (k >> s) & 1 == 1;
                        }
                    }
                    b.begin_cycle();
                    b.input(src).push((src, k));
                    let got = run_until_drained(&mut b, 1);
                    assert_eq!(got.len(), 1);
                    assert_eq!(got[0].1, src ^ (!k & (n - 1)));
                    reach[src][got[0].1] = true;
                }
            }
            assert!(reach.iter().flatten().all(|&r| r), "n = {n}");
        }
    }

    #[test]
    fn single_task_latency() {
        let mut b = Butterfly::new(16, 4, 4, 1).unwrap();
        b.begin_cycle();
        b.input(5).push((5, 0));
        let mut cycles = 0;
        loop {
            b.begin_cycle();
            cycles += 1;
            if (0..16).any(|j| b.output_ref(j).can_pop()) {
                break;
            }
            b.step();
        }
        // pushed in cycle 0, visible at the output after 2 cycles per stage
        assert_eq!(cycles, 2 * 4 + 1);
    }

    #[test]
    fn saturated_throughput() {
        let n = 8;
        let mut b = Butterfly::new(n, 4, 4, 1).unwrap();
        let cycles = 2000;
        let mut out = 0u64;
        for t in 0..cycles {
            b.begin_cycle();
            for j in 0..n {
                if b.output(j).can_pop() {
                    b.output(j).pop();
                    if t >= 100 {
                        out += 1;
                    }
                }
                if b.input(j).can_push() {
                    b.input(j).push((j, t));
                }
            }
            b.step();
        }
        assert_eq!(out, (n * (cycles - 100)) as u64);
    }
}
