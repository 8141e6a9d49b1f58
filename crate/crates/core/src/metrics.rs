//! Bandwidth, throughput and bubble accounting over simulation reports.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::EntryWidth;
use crate::sim::{MemConfig, SimReport};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("report covers zero cycles")]
    ZeroCycles,
    #[error("no post-warmup cycles with pending queries")]
    EmptyWindow,
    #[error("unknown export format {0:?} (expected csv or json)")]
    UnknownFormat(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// Bytes of one random access at 64-bit granularity.
pub const ACCESS_BYTES: u32 = 8;

/// Memory system parameters for the peak random-access model.
///
/// `t_rrd_cycles` is the row-to-row delay in memory-clock cycles, so one
/// channel completes `f_mem / t_rrd_cycles` random accesses per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemSpec {
    pub f_mem: f64,
    pub t_rrd_cycles: f64,
    pub n_chn: u32,
    pub access_bytes: u32,
}

impl MemSpec {
    pub fn new(f_mem: f64, t_rrd_cycles: f64, n_chn: u32) -> Result<Self> {
        let s = Self {
            f_mem,
            t_rrd_cycles,
            n_chn,
            access_bytes: ACCESS_BYTES,
        };
        s.validate()?;
        Ok(s)
    }

    /// The channel model used by the simulator: each channel accepts one
    /// request every `service_interval` cycles of a `cycles_per_second` clock.
    pub fn for_simulation(mem: &MemConfig, n_chn: usize, cycles_per_second: f64) -> Result<Self> {
        Self::new(cycles_per_second, mem.service_interval as f64, n_chn as u32)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("f_mem", self.f_mem),
            ("t_rrd_cycles", self.t_rrd_cycles),
            ("n_chn", self.n_chn as f64),
            ("access_bytes", self.access_bytes as f64),
        ];
        for (field, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(MetricsError::NonPositive { field, value });
            }
        }
        Ok(())
    }

    /// Random accesses per second on one channel.
    pub fn channel_rate(&self) -> f64 {
        self.f_mem / self.t_rrd_cycles
    }
}

/// Peak random-access bandwidth in bytes per second.
pub fn peak_bandwidth(spec: &MemSpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.channel_rate() * spec.n_chn as f64 * spec.access_bytes as f64)
}

/// What counts as traversal traffic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Accounting {
    /// One row-pointer word and one column word per step.
    #[default]
    Base,
    /// Full row-pointer entry width, plus one alias-table word per step for
    /// alias-sampled walks.
    WithAux,
}

impl FromStr for Accounting {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "base" => Ok(Self::Base),
            "with-aux" | "aux" => Ok(Self::WithAux),
            _ => Err(format!("unknown accounting mode {s:?}")),
        }
    }
}

pub fn bytes_per_step(report: &SimReport, accounting: Accounting) -> u64 {
    let word = ACCESS_BYTES as u64;
    match accounting {
        Accounting::Base => 2 * word,
        Accounting::WithAux => {
            let alias = if report.rp_entry_bytes == EntryWidth::W256.bytes() {
                word
            } else {
                0
            };
            report.rp_entry_bytes + word + alias
        }
    }
}

pub fn traversed_bytes(report: &SimReport, accounting: Accounting) -> u64 {
    report.completed_steps * bytes_per_step(report, accounting)
}

fn seconds(report: &SimReport, cycles_per_second: f64) -> Result<f64> {
    if !(cycles_per_second > 0.0) {
        return Err(MetricsError::NonPositive {
            field: "cycles_per_second",
            value: cycles_per_second,
        });
    }
    if report.total_cycles == 0 {
        return Err(MetricsError::ZeroCycles);
    }
    Ok(report.total_cycles as f64 / cycles_per_second)
}

/// Traversal bytes divided by wall time.
pub fn effective_bandwidth(
    report: &SimReport,
    cycles_per_second: f64,
    accounting: Accounting,
) -> Result<f64> {
    let t = seconds(report, cycles_per_second)?;
    Ok(traversed_bytes(report, accounting) as f64 / t)
}

/// Effective over peak bandwidth, using base accounting so the ratio is
/// bounded by the per-channel rate cap.
pub fn utilization(report: &SimReport, spec: &MemSpec, cycles_per_second: f64) -> Result<f64> {
    let u = effective_bandwidth(report, cycles_per_second, Accounting::Base)? / peak_bandwidth(spec)?;
    debug_assert!((0.0..=1.0 + 1e-12).contains(&u), "utilization {u}");
    Ok(u)
}

/// Million completed hops per second.
pub fn throughput_msteps(report: &SimReport, cycles_per_second: f64) -> Result<f64> {
    if report.completed_steps == 0 {
        return Ok(0.0);
    }
    let t = seconds(report, cycles_per_second)?;
    Ok(report.completed_steps as f64 / t / 1e6)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleRatio {
    pub per_pipeline: Vec<f64>,
    pub aggregate: f64,
}

/// Sampling-stage idle cycles while queries were pending, over the
/// post-warmup window.
pub fn bubble_ratio(report: &SimReport) -> Result<BubbleRatio> {
    if report.window_cycles == 0 || report.bubbles.is_empty() {
        return Err(MetricsError::EmptyWindow);
    }
    let w = report.window_cycles as f64;
    let per_pipeline: Vec<f64> = report.bubbles.iter().map(|&b| b as f64 / w).collect();
    let aggregate = report.total_bubbles() as f64 / (w * report.bubbles.len() as f64);
    Ok(BubbleRatio {
        per_pipeline,
        aggregate,
    })
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub run_id: String,
    pub algo: String,
    pub graph: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub cycles: u64,
    pub steps: u64,
    pub msteps: f64,
    pub util: f64,
    pub bubble_ratio: f64,
}

pub const CSV_HEADER: &str = "run_id,algo,graph,N,cycles,steps,msteps,util,bubble_ratio";

impl RunRow {
    /// Empty runs and runs that never had a backlogged window report zeros.
    pub fn from_report(
        run_id: impl Into<String>,
        graph: impl Into<String>,
        report: &SimReport,
        mem: &MemConfig,
        cycles_per_second: f64,
    ) -> Result<Self> {
        let (msteps, util) = if report.total_cycles == 0 {
            (0.0, 0.0)
        } else {
            let spec =
                MemSpec::for_simulation(mem, report.channel_accesses.len().max(1), cycles_per_second)?;
            (
                throughput_msteps(report, cycles_per_second)?,
                utilization(report, &spec, cycles_per_second)?,
            )
        };
        let bubble_ratio = match bubble_ratio(report) {
            Ok(b) => b.aggregate,
            Err(MetricsError::EmptyWindow) => 0.0,
            Err(e) => return Err(e),
        };
        Ok(Self {
            run_id: run_id.into(),
            algo: report.algo.name().to_string(),
            graph: graph.into(),
            n: report.n_pipelines,
            cycles: report.total_cycles,
            steps: report.completed_steps,
            msteps,
            util,
            bubble_ratio,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = MetricsError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(MetricsError::UnknownFormat(s.to_string())),
        }
    }
}

/// Writes rows as CSV (with header when `header` is set) or as a JSON array.
pub fn export_rows<W: Write>(rows: &[RunRow], format: ExportFormat, header: bool, w: W) -> Result<()> {
    match format {
        ExportFormat::Csv => {
            let mut wr = csv::WriterBuilder::new().has_headers(header).from_writer(w);
            if header && rows.is_empty() {
                wr.write_record(CSV_HEADER.split(','))?;
            }
            for r in rows {
                wr.serialize(r)?;
            }
            wr.flush()?;
        }
        ExportFormat::Json => serde_json::to_writer_pretty(w, rows)?,
    }
    Ok(())
}

pub fn report_to_json(report: &SimReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn report_from_json(s: &str) -> Result<SimReport> {
    Ok(serde_json::from_str(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::AlgoKind;

    fn report(steps: u64, cycles: u64) -> SimReport {
        let mut r = SimReport::empty(AlgoKind::Urw, 2);
        r.completed_steps = steps;
        r.total_cycles = cycles;
        r
    }

    #[test]
    fn peak_per_channel_and_aggregate() {
        let one = MemSpec::new(284e6, 1.0, 1).unwrap();
        assert_eq!(peak_bandwidth(&one).unwrap(), 2.272e9);
        let many = MemSpec::new(284e6, 1.0, 32).unwrap();
        assert_eq!(peak_bandwidth(&many).unwrap(), 32.0 * 2.272e9);
        // same rate expressed through a faster clock and a longer row delay
        let slow = MemSpec::new(1136e6, 4.0, 1).unwrap();
        assert_eq!(peak_bandwidth(&slow).unwrap(), 2.272e9);
    }

    #[test]
    fn spec_rejects_nonpositive_fields() {
        assert!(matches!(
            MemSpec::new(1e9, 1.0, 0),
            Err(MetricsError::NonPositive { field: "n_chn", .. })
        ));
        assert!(MemSpec::new(0.0, 1.0, 1).is_err());
        assert!(MemSpec::new(1e9, -2.0, 1).is_err());
    }

    #[test]
    fn effective_bandwidth_arithmetic() {
        let r = report(1000, 2000);
        assert_eq!(effective_bandwidth(&r, 1e9, Accounting::Base).unwrap(), 8e9);
        assert_eq!(effective_bandwidth(&report(0, 10), 1e9, Accounting::Base).unwrap(), 0.0);
        assert!(matches!(
            effective_bandwidth(&report(5, 0), 1e9, Accounting::Base),
            Err(MetricsError::ZeroCycles)
        ));
    }

    #[test]
    fn aux_accounting_uses_entry_width() {
        let mut r = report(10, 10);
        r.rp_entry_bytes = 32;
        assert_eq!(bytes_per_step(&r, Accounting::WithAux), 48);
        r.rp_entry_bytes = 16;
        assert_eq!(bytes_per_step(&r, Accounting::WithAux), 24);
        assert_eq!(bytes_per_step(&r, Accounting::Base), 16);
    }

    #[test]
    fn throughput_arithmetic() {
        let r = report(1_000_000, 1_000_000);
        assert!((throughput_msteps(&r, 320e6).unwrap() - 320.0).abs() < 1e-9);
        assert_eq!(throughput_msteps(&report(0, 0), 320e6).unwrap(), 0.0);
    }

    #[test]
    fn full_pipelining_is_full_utilization() {
        // N pipelines, one step per pipeline per cycle, 2N channels
        let r = report(2 * 500, 500);
        let spec = MemSpec::for_simulation(&MemConfig::default(), 4, 1e9).unwrap();
        assert!((utilization(&r, &spec, 1e9).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bubble_ratio_bounds() {
        let mut r = report(0, 100);
        assert!(matches!(bubble_ratio(&r), Err(MetricsError::EmptyWindow)));
        r.window_cycles = 50;
        assert_eq!(bubble_ratio(&r).unwrap().aggregate, 0.0);
        r.bubbles = vec![50, 50];
        let b = bubble_ratio(&r).unwrap();
        assert_eq!(b.aggregate, 1.0);
        assert_eq!(b.per_pipeline, vec![1.0, 1.0]);
        r.bubbles = vec![10, 0];
        assert_eq!(bubble_ratio(&r).unwrap().aggregate, 0.1);
    }

    #[test]
    fn csv_header_and_appending() {
        let r = report(100, 200);
        let row = RunRow::from_report("a", "g", &r, &MemConfig::default(), 1e9).unwrap();
        let mut buf = Vec::new();
        export_rows(&[row.clone()], ExportFormat::Csv, true, &mut buf).unwrap();
        export_rows(&[row], ExportFormat::Csv, false, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("a,urw,g,2,200,100,"));
    }

    #[test]
    fn json_report_round_trip() {
        let mut r = report(7, 9);
        r.bubbles = vec![1, 2];
        r.channel_accesses = vec![3, 4, 5, 6];
        let back = report_from_json(&report_to_json(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn unknown_format_is_an_error() {
        assert!(matches!(
            "xml".parse::<ExportFormat>(),
            Err(MetricsError::UnknownFormat(_))
        ));
        assert_eq!("JSON".parse::<ExportFormat>().unwrap(), ExportFormat::Json);
    }
}
