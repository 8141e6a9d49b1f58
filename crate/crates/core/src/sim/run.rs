use std::collections::VecDeque;

use super::{
    AsyncEngine, ChannelMapping, FifoChannel, MemoryChannel, SimConfig, SimError, SimOutput,
    SimReport, TraceLog,
};
use crate::graph::MemoryLayout;
use crate::sampling::key_from_seed;
use crate::scheduler::SchedulerFabric;
use crate::walk::{advance, make_task, sample_step, PathSink, Query, StepOutcome, WalkTask};

struct Pipeline {
    ra: AsyncEngine,
    ra_sp: FifoChannel<WalkTask>,
    retry: FifoChannel<WalkTask>,
    sp_ca: FifoChannel<WalkTask>,
    ca: AsyncEngine,
}

impl Pipeline {
    fn begin_cycle(&mut self, now: u64) {
        self.ra.begin_cycle(now);
        self.ca.begin_cycle(now);
        self.ra_sp.begin_cycle();
        self.retry.begin_cycle();
        self.sp_ca.begin_cycle();
    }

    fn live_tasks(&self) -> usize {
        self.ra.in_flight() + self.ra_sp.len() + self.retry.len() + self.sp_ca.len() + self.ca.in_flight()
    }
}

/// Runs `queries` to completion and returns paths, counters and trace.
pub fn simulate(
    cfg: &SimConfig,
    layout: &MemoryLayout,
    queries: &[Query],
) -> Result<SimOutput, SimError> {
    cfg.validate()?;
    let n = cfg.n_pipelines;
    let params = &cfg.params;
    for q in queries {
        q.validate(layout.num_vertices())?;
    }
    if params.kind == crate::sampling::AlgoKind::MetaPath && layout.vertex_types().is_none() {
        return Err(SimError::Config("metapath walks need vertex types".into()));
    }
    if layout.entry_width() != crate::graph::EntryWidth::for_algo(params.kind) {
        return Err(SimError::Config(format!(
            "layout was built for {}-bit entries, {} needs {}",
            layout.entry_width().bits(),
            params.kind,
            crate::graph::EntryWidth::for_algo(params.kind).bits()
        )));
    }
    let n_row = layout.n_row_channels();
    let n_channels = match cfg.mapping {
        ChannelMapping::Partitioned => {
            if n_row != n || layout.n_col_channels() != n {
                return Err(SimError::Config(format!(
                    "partitioned mapping needs {n} row and {n} column channels, layout has {} and {}",
                    n_row,
                    layout.n_col_channels()
                )));
            }
            2 * n
        }
        ChannelMapping::Private => 2 * n,
    };

    let key = key_from_seed(cfg.seed);
    let mem_key = key_from_seed(cfg.seed ^ 0x6a09_e667_f3bc_c909);
    let max_live = cfg.max_live();
    let warmup = cfg.warmup();
    let mut fabric = SchedulerFabric::new(
        n,
        cfg.internal_fifo_depth,
        cfg.pipeline_depth(),
        cfg.feedback_delay(),
        max_live + 1,
    )?;
    let mut pipes: Vec<Pipeline> = (0..n)
        .map(|i| Pipeline {
            ra: AsyncEngine::new(i, cfg.mem),
            ra_sp: FifoChannel::new(cfg.stage_fifo_depth),
            retry: FifoChannel::new(cfg.retry_fifo_depth),
            sp_ca: FifoChannel::new(cfg.stage_fifo_depth),
            ca: AsyncEngine::new(n + i, cfg.mem),
        })
        .collect();
    let mut channels: Vec<MemoryChannel> = (0..n_channels)
        .map(|c| MemoryChannel::new(c, mem_key))
        .collect();
    let mut loader: VecDeque<Query> = queries.iter().copied().collect();
    let mut sink = PathSink::new(cfg.write_granularity);
    let mut trace = TraceLog::new(cfg.trace_limit);
    let mut report = SimReport::empty(params.kind, n);
    report.rp_entry_bytes = layout.entry_width().bytes();
    report.warmup_cycles = warmup;

    let mut live = 0usize;
    let mut injected = 0u64;
    let mut now = 0u64;
    let mut last_progress = 0u64;
    let mut lane_start = 0usize;
    let mut to_finish: Vec<u64> = Vec::new();

    while !loader.is_empty() || live > 0 {
        let backlog = !loader.is_empty();
        let in_window = backlog && now >= warmup;
        if in_window {
            report.window_cycles += 1;
        }
        fabric.begin_cycle();
        for p in &mut pipes {
            p.begin_cycle(now);
        }
        let mut progress = false;

        for (i, p) in pipes.iter_mut().enumerate() {
            // column access: retire
            if p.ca.can_retire(now) {
                let t = p.ca.retire();
                let entry = t.stage.entry.expect("column task carries its entry");
                let j = t.stage.sampled.expect("column task carries its index") as u64;
                let v = layout.neighbor(&entry, j);
                sink.collect(t.query_id, t.hop + 1, v)?;
                report.completed_steps += 1;
                let next = advance(&t, v, params);
                trace.record(now, || format!("p{i}.ca"), "done", t.query_id, t.hop);
                if next.hop >= params.max_len {
                    to_finish.push(next.query_id);
                } else {
                    fabric.return_task(i, next);
                }
                progress = true;
            }
            // column access: issue
            if p.sp_ca.can_pop() && p.ca.can_accept() {
                let t = p.sp_ca.pop();
                let ch = match cfg.mapping {
                    ChannelMapping::Partitioned => {
                        let e = t.stage.entry.expect("entry");
                        n_row + layout.locate(&e, t.stage.sampled.expect("index") as u64).channel
                    }
                    ChannelMapping::Private => n + i,
                };
                trace.record(now, || format!("p{i}.ca"), "issue", t.query_id, t.hop);
                channels[ch].submit(p.ca.accept(t));
                report.stage_busy.ca[i] += 1;
                progress = true;
            }
            // sampling
            let mut sp_busy = false;
            if p.sp_ca.can_push() && p.retry.can_push() {
                let from = if p.retry.can_pop() {
                    Some(&mut p.retry)
                } else if p.ra_sp.can_pop() {
                    Some(&mut p.ra_sp)
                } else {
                    None
                };
                if let Some(f) = from {
                    let mut t = f.pop();
                    let entry = t.stage.entry.expect("sampling task carries its entry");
                    match sample_step(layout, entry, &t, params, key)? {
                        StepOutcome::Stop(_) => {
                            trace.record(now, || format!("p{i}.sp"), "stop", t.query_id, t.hop);
                            to_finish.push(t.query_id);
                        }
                        StepOutcome::Retry => {
                            t.stage.retries += 1;
                            report.sampling_retries += 1;
                            trace.record(now, || format!("p{i}.sp"), "retry", t.query_id, t.hop);
                            p.retry.push(t);
                        }
                        StepOutcome::Sampled { index, .. } => {
                            t.stage.sampled = Some(index as u32);
                            trace.record(now, || format!("p{i}.sp"), "sample", t.query_id, t.hop);
                            p.sp_ca.push(t);
                        }
                    }
                    sp_busy = true;
                    progress = true;
                }
            }
            if sp_busy {
                report.stage_busy.sp[i] += 1;
            } else if in_window {
                report.bubbles[i] += 1;
            }
            // row access: retire
            if p.ra.can_retire(now) && p.ra_sp.can_push() {
                let mut t = p.ra.retire();
                t.stage.entry = Some(*layout.entry(t.curr));
                trace.record(now, || format!("p{i}.ra"), "done", t.query_id, t.hop);
                p.ra_sp.push(t);
                progress = true;
            }
            // row access: issue
            let input = fabric.pipeline_input(i);
            if input.can_pop() && p.ra.can_accept() {
                let t = input.pop();
                let ch = match cfg.mapping {
                    ChannelMapping::Partitioned => layout.row_channel_of(t.curr),
                    ChannelMapping::Private => i,
                };
                trace.record(now, || format!("p{i}.ra"), "issue", t.query_id, t.hop);
                channels[ch].submit(p.ra.accept(t));
                report.stage_busy.ra[i] += 1;
                progress = true;
            }
        }

        for qid in to_finish.drain(..) {
            sink.finish(qid)?;
            live -= 1;
            report.completed_queries += 1;
            trace.record(now, || "sink".to_string(), "complete", qid, 0);
        }

        fabric.step();

        for k in 0..n {
            let lane = (lane_start + k) % n;
            if live >= max_live || loader.is_empty() || !fabric.can_inject(lane) {
                continue;
            }
            let q = loader.pop_front().expect("nonempty loader");
            sink.collect(q.query_id, 0, q.v_start)?;
            fabric.inject(lane, make_task(&q));
            trace.record(now, || "loader".to_string(), "inject", q.query_id, 0);
            live += 1;
            injected += 1;
            progress = true;
        }
        lane_start = (lane_start + 1) % n;

        for ch in &mut channels {
            if let Some((req, ready)) = ch.serve(now, &cfg.mem) {
                let p = &mut pipes[req.engine % n];
                let engine = if req.engine < n { &mut p.ra } else { &mut p.ca };
                engine.respond(req.seq, ready);
                progress = true;
            }
        }

        if cfg!(debug_assertions) && now.is_multiple_of(4096) {
            let held: usize = fabric.in_flight() + pipes.iter().map(Pipeline::live_tasks).sum::<usize>();
            if held != live || injected != live as u64 + report.completed_queries {
                return Err(SimError::Invariant(format!(
                    "cycle {now}: {held} tasks held, {live} live, {injected} injected"
                )));
            }
        }

        if progress {
            last_progress = now;
        } else if now - last_progress > cfg.watchdog_cycles {
            return Err(SimError::Deadlock {
                cycle: now,
                idle: now - last_progress,
                live,
            });
        }
        now += 1;
    }

    report.total_cycles = now;
    for i in 0..n {
        report.stage_idle.ra[i] = now - report.stage_busy.ra[i];
        report.stage_idle.sp[i] = now - report.stage_busy.sp[i];
        report.stage_idle.ca[i] = now - report.stage_busy.ca[i];
    }
    report.channel_accesses = channels.iter().map(MemoryChannel::accesses).collect();
    report.scheduler = fabric.stats();
    let paths = sink.into_paths();
    let steps: u64 = paths.values().map(|p| p.len() as u64 - 1).sum();
    if steps != report.completed_steps {
        return Err(SimError::Invariant(format!(
            "{} steps counted but paths hold {steps}",
            report.completed_steps
        )));
    }
    Ok(SimOutput {
        paths,
        report,
        trace,
    })
}
