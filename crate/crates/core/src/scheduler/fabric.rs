//! New-query balancer, merger bank and pipeline dispatcher wired together.

use super::butterfly::Butterfly;
use super::cells::MergeCell;
use super::{SchedulerError, SchedulerStats};
use crate::sim::FifoChannel;
use crate::walk::WalkTask;

#[derive(Debug, Clone)]
pub struct SchedulerFabric {
    n: usize,
    /// Spreads freshly loaded queries over the merger bank.
    pub balancer: Butterfly<WalkTask>,
    /// Unfinished tasks coming back from each pipeline.
    pub returned: Vec<FifoChannel<WalkTask>>,
    pub mergers: Vec<MergeCell>,
    /// Outputs are the pipeline input FIFOs.
    pub dispatcher: Butterfly<WalkTask>,
}

impl SchedulerFabric {
    pub fn new(
        n: usize,
        internal_depth: usize,
        pipeline_depth: usize,
        feedback_delay: usize,
        return_depth: usize,
    ) -> Result<Self, SchedulerError> {
        Ok(Self {
            n,
            balancer: Butterfly::new(n, internal_depth, internal_depth, 1)?,
            returned: (0..n).map(|_| FifoChannel::new(return_depth)).collect(),
            mergers: (0..n).map(|_| MergeCell::new()).collect(),
            dispatcher: Butterfly::new(n, internal_depth, pipeline_depth, feedback_delay)?,
        })
    }

    pub fn lanes(&self) -> usize {
        self.n
    }

    /// Cycles from an injected or returned task to a pipeline input, unblocked.
    pub fn round_trip_latency(&self) -> usize {
        self.balancer.latency() + 1 + self.dispatcher.latency()
    }

    pub fn begin_cycle(&mut self) {
        self.balancer.begin_cycle();
        self.dispatcher.begin_cycle();
        for f in &mut self.returned {
            f.begin_cycle();
        }
    }

    pub fn can_inject(&self, lane: usize) -> bool {
        self.balancer.input_ref(lane).can_push()
    }

    pub fn inject(&mut self, lane: usize, task: WalkTask) {
        self.balancer.input(lane).push(task);
    }

    pub fn return_task(&mut self, pipeline: usize, task: WalkTask) {
        self.returned[pipeline].push(task);
    }

    pub fn pipeline_input(&mut self, pipeline: usize) -> &mut FifoChannel<WalkTask> {
        self.dispatcher.output(pipeline)
    }

    pub fn pipeline_input_ref(&self, pipeline: usize) -> &FifoChannel<WalkTask> {
        self.dispatcher.output_ref(pipeline)
    }

    /// One scheduler cycle over all cells.
    pub fn step(&mut self) {
        self.balancer.step();
        for i in 0..self.n {
            self.mergers[i].step_priority(
                &mut self.returned[i],
                self.balancer.output(i),
                self.dispatcher.input(i),
            );
        }
        self.dispatcher.step();
    }

    /// Tasks inside the fabric, including returned tasks not yet merged.
    pub fn in_flight(&self) -> usize {
        let mut total: usize = self.returned.iter().map(FifoChannel::len).sum();
        for b in [&self.balancer, &self.dispatcher] {
            total += b.occupancy();
        }
        total
    }

    pub fn stats(&self) -> SchedulerStats {
        let mut s = SchedulerStats {
            per_pipeline_dispatch: self.dispatcher.delivered().to_vec(),
            ..SchedulerStats::default()
        };
        for b in [&self.balancer, &self.dispatcher] {
            for d in b.dispatchers() {
                s.dispatch_decisions += d.stats.side1 + d.stats.side2;
                s.dispatch_blocks += d.stats.blocked_cycles;
                s.dispatch_repeats += d.stats.repeats;
            }
            for m in b.mergers() {
                s.merge_decisions += m.stats.side1 + m.stats.side2;
                s.merge_repeats += m.stats.repeats;
            }
        }
        for m in &self.mergers {
            s.merge_decisions += m.stats.side1 + m.stats.side2;
            s.merge_repeats += m.stats.repeats;
            s.returned_merged += m.stats.side1;
            s.new_merged += m.stats.side2;
        }
        s
    }
}
