mod config;
mod error;
mod experiment;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use grw_core::graph::{
    assign_weights, build_csr, gen_rmat, load_types, read_edge_list_file, write_csr_cache, write_edge_list,
    RmatParams,
};
use grw_core::metrics::{export_rows, report_from_json, report_to_json, ExportFormat, RunRow};
use grw_core::sim::MemConfig;

use config::{ExperimentConfig, GraphSource, Mode, Settings};
use error::CliError;
use experiment::{build_layout, load_graph, make_queries, run_mode, summary_row};

#[derive(Parser)]
#[command(name = "grw", version, about = "Cycle-level simulator for streaming graph random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an RMAT edge list with a `.meta.json` sidecar.
    GenRmat(GenRmatArgs),
    /// Convert an edge list to the binary CSR cache.
    Convert(ConvertArgs),
    /// Simulate one configuration; writes paths, report and summary.
    Run(ExperimentArgs),
    /// Run all four modes for every repetition.
    Ablate(ExperimentArgs),
    /// Vary one parameter over a list of values.
    Sweep(SweepArgs),
    /// Turn saved JSON reports into summary rows.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RmatKind {
    Balanced,
    Graph500,
}

#[derive(Args)]
struct GenRmatArgs {
    #[arg(long)]
    scale: u32,
    #[arg(long, default_value_t = 16)]
    edge_factor: u32,
    #[arg(long, value_enum, default_value = "balanced")]
    kind: RmatKind,
    /// Top-left quadrant probability; the other three split the rest evenly.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    weighted: bool,
    #[arg(long)]
    no_scramble: bool,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct ConvertArgs {
    input: PathBuf,
    #[arg(long, short)]
    output: PathBuf,
    /// Vertex type file, one label per line.
    #[arg(long)]
    types: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Edge list or `.csr` cache.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    pipelines: Option<usize>,
    #[arg(long)]
    queries: Option<usize>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    repetitions: Option<usize>,
    /// Override any setting, e.g. `--set sim.fixed_latency=200`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

impl ExperimentArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        s.set_opt("output.dir", self.out.as_ref().map(|p| p.display()))?;
        s.set_opt("run.seed", self.seed)?;
        s.set_opt("graph.file", self.graph.as_ref().map(|p| p.display()))?;
        s.set_opt("algo.name", self.algo.as_ref())?;
        s.set_opt("sim.pipelines", self.pipelines)?;
        s.set_opt("run.queries", self.queries)?;
        s.set_opt("run.mode", self.mode.as_ref())?;
        s.set_opt("run.repetitions", self.repetitions)?;
        for o in &self.overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected SECTION.KEY=VALUE, got `{o}`")))?;
            s.set(k.trim(), v)?;
        }
        Ok(s)
    }

    fn config(&self) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::from_settings(&self.settings()?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    #[value(name = "N")]
    N,
    FifoDepth,
    Latency,
    Skew,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    #[arg(long, value_enum)]
    axis: Axis,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    values: Vec<String>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long, default_value = "-")]
    graph: String,
    #[arg(long, default_value_t = 1e9)]
    clock_hz: f64,
    /// Cycles between two accesses of one channel in the reported run.
    #[arg(long, default_value_t = 1)]
    service_interval: u64,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct RmatMeta {
    scale: u32,
    edge_factor: u32,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    scramble: bool,
    weighted: bool,
    seed: u64,
    num_vertices: usize,
    num_edges: usize,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn gen_rmat_cmd(args: &GenRmatArgs) -> Result<(), CliError> {
    let mut p = match args.kind {
        RmatKind::Balanced => RmatParams::balanced(args.scale, args.edge_factor),
        RmatKind::Graph500 => RmatParams::graph500(args.scale, args.edge_factor),
    };
    if let Some(a) = args.a {
        let rest = (1.0 - a) / 3.0;
        (p.a, p.b, p.c, p.d) = (a, rest, rest, 1.0 - a - 2.0 * rest);
    }
    p.scramble = !args.no_scramble;
    p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut edges = gen_rmat(&p, args.seed)?;
    if args.weighted {
        assign_weights(&mut edges, args.seed);
    }
    write_edge_list(create(&args.output)?, &edges)?;
    let meta = RmatMeta {
        scale: p.scale,
        edge_factor: p.edge_factor,
        a: p.a,
        b: p.b,
        c: p.c,
        d: p.d,
        scramble: p.scramble,
        weighted: args.weighted,
        seed: args.seed,
        num_vertices: p.num_vertices(),
        num_edges: edges.len(),
    };
    let meta_path = args.output.with_extension("meta.json");
    serde_json::to_writer_pretty(create(&meta_path)?, &meta)?;
    println!("{} edges over {} vertices -> {}", edges.len(), p.num_vertices(), args.output.display());
    Ok(())
}

fn convert_cmd(args: &ConvertArgs) -> Result<(), CliError> {
    let list = read_edge_list_file(&args.input)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    let mut g = build_csr(&list.edges, list.num_vertices)?;
    if let Some(path) = &args.types {
        let types = load_types(std::io::BufReader::new(File::open(path)?))
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        g = g.with_vertex_types(types)?;
    }
    write_csr_cache(create(&args.output)?, &g)?;
    println!("{} vertices, {} edges -> {}", g.num_vertices(), g.num_edges(), args.output.display());
    Ok(())
}

fn write_rows(path: &Path, rows: &[RunRow]) -> Result<(), CliError> {
    export_rows(rows, ExportFormat::Csv, true, create(path)?)?;
    Ok(())
}

fn run_cmd(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let g = load_graph(cfg)?;
    let queries = make_queries(&g, cfg, cfg.seed)?;
    let layout = build_layout(&g, cfg, cfg.n_pipelines)?;
    let out = run_mode(cfg, &layout, &queries, cfg.mode, cfg.seed)?;

    fs::create_dir_all(&cfg.out)?;
    let mut w = create(&cfg.out.join("paths.txt"))?;
    for (qid, path) in &out.paths {
        let vs: Vec<String> = path.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{qid}\t{}", vs.join(" "))?;
    }
    w.flush()?;
    fs::write(cfg.out.join("report.json"), report_to_json(&out.report)?)?;
    if out.trace.enabled() {
        fs::write(cfg.out.join("trace.txt"), out.trace.lines().join("\n") + "\n")?;
    }
    let row = summary_row(cfg, format!("{}-r0", cfg.mode), &out.report)?;
    write_rows(&cfg.out.join("summary.csv"), std::slice::from_ref(&row))?;
    println!(
        "{}: {} queries, {} steps in {} cycles, {:.1} Msteps/s, util {:.3}",
        cfg.mode, out.report.completed_queries, row.steps, row.cycles, row.msteps, row.util
    );
    Ok(())
}

/// Runs every (config, mode, repetition) job in parallel; rows keep job order.
fn run_jobs(jobs: Vec<(String, ExperimentConfig, Mode, usize)>) -> Result<Vec<RunRow>, CliError> {
    jobs.into_par_iter()
        .map(|(run_id, cfg, mode, rep)| {
            let seed = cfg.rep_seed(rep);
            let g = load_graph(&cfg)?;
            let queries = make_queries(&g, &cfg, seed)?;
            let layout = build_layout(&g, &cfg, cfg.n_pipelines)?;
            let out = run_mode(&cfg, &layout, &queries, mode, seed)?;
            summary_row(&cfg, run_id, &out.report)
        })
        .collect()
}

fn print_rows(rows: &[RunRow]) -> Result<(), CliError> {
    export_rows(rows, ExportFormat::Csv, true, std::io::stdout().lock())?;
    Ok(())
}

fn ablate_cmd(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let jobs = (0..cfg.repetitions)
        .flat_map(|rep| Mode::ALL.map(|m| (format!("{m}-r{rep}"), cfg.clone(), m, rep)))
        .collect();
    let rows = run_jobs(jobs)?;
    write_rows(&cfg.out.join("ablation.csv"), &rows)?;
    print_rows(&rows)
}

fn sweep_point(base: &ExperimentConfig, axis: Axis, value: &str) -> Result<ExperimentConfig, CliError> {
    let bad = |e: String| CliError::Usage(format!("sweep value `{value}`: {e}"));
    let mut cfg = base.clone();
    match axis {
        Axis::N => cfg.n_pipelines = value.parse().map_err(|e| bad(format!("{e}")))?,
        Axis::FifoDepth => cfg.pipeline_fifo_depth = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
        Axis::Latency => cfg.mem.fixed_latency = value.parse().map_err(|e| bad(format!("{e}")))?,
        Axis::Skew => {
            let GraphSource::Rmat { params, .. } = &mut cfg.graph else {
                return Err(CliError::Usage("the skew axis needs an RMAT graph (graph.rmat_scale)".into()));
            };
            let a: f64 = value.parse().map_err(|e| bad(format!("{e}")))?;
            let rest = (1.0 - a) / 3.0;
            (params.a, params.b, params.c, params.d) = (a, rest, rest, 1.0 - a - 2.0 * rest);
            params.validate().map_err(|e| bad(e.to_string()))?;
        }
    }
    cfg.sim_config(cfg.seed).validate().map_err(|e| bad(e.to_string()))?;
    Ok(cfg)
}

fn sweep_cmd(args: &SweepArgs) -> Result<(), CliError> {
    let base = args.common.config()?;
    let values: Vec<&str> = args.values.iter().map(|v| v.trim()).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(CliError::Usage("--values must list at least one value".into()));
    }
    let axis_name = args.axis.to_possible_value().expect("named axis").get_name().to_string();
    let points = values
        .iter()
        .map(|v| sweep_point(&base, args.axis, v).map(|c| (v.to_string(), c)))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs = points
        .into_iter()
        .flat_map(|(v, cfg)| {
            let id = format!("{axis_name}={v}");
            (0..cfg.repetitions).map(move |rep| (format!("{id}-r{rep}"), cfg.clone(), cfg.mode, rep))
        })
        .collect();
    let rows = run_jobs(jobs)?;
    write_rows(&base.out.join("sweep.csv"), &rows)?;
    print_rows(&rows)
}

fn report_cmd(args: &ReportArgs) -> Result<(), CliError> {
    let format: ExportFormat = args.format.parse().map_err(|e: grw_core::metrics::MetricsError| CliError::Usage(e.to_string()))?;
    if !(args.clock_hz > 0.0) || args.service_interval == 0 {
        return Err(CliError::Usage("--clock-hz and --service-interval must be positive".into()));
    }
    let mem = MemConfig { service_interval: args.service_interval, ..MemConfig::default() };
    let mut rows = Vec::new();
    for path in &args.reports {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let report = report_from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let run_id = path
            .parent()
            .and_then(|d| d.file_name())
            .unwrap_or(path.as_os_str())
            .to_string_lossy()
            .into_owned();
        rows.push(RunRow::from_report(run_id, args.graph.clone(), &report, &mem, args.clock_hz)?);
    }
    match &args.output {
        Some(p) => export_rows(&rows, format, true, create(p)?)?,
        None => export_rows(&rows, format, true, std::io::stdout().lock())?,
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::GenRmat(a) => gen_rmat_cmd(a),
        Command::Convert(a) => convert_cmd(a),
        Command::Run(a) => run_cmd(&a.config()?),
        Command::Ablate(a) => ablate_cmd(&a.config()?),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Report(a) => report_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
