//! Experiment configuration: `key = value` files with `[section]` headers,
//! overridden by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use grw_core::graph::{BlockMode, RmatParams};
use grw_core::sampling::{AlgoKind, AlgoParams};
use grw_core::sim::{ChannelMapping, MemConfig, SimConfig};

use crate::error::CliError;

const KEYS: &[(&str, &[&str])] = &[
    (
        "graph",
        &[
            "file", "types", "rmat_scale", "rmat_edge_factor", "rmat_kind", "rmat_a", "rmat_b",
            "rmat_c", "scramble", "weighted", "graph_seed",
        ],
    ),
    ("algo", &["name", "alpha", "p", "q", "schema", "max_len"]),
    (
        "sim",
        &[
            "pipelines", "fifo_depth", "feedback_delay", "mapping", "block_edges", "max_live",
            "fixed_latency", "jitter_window", "service_interval", "max_outstanding", "txn_ids",
            "meta_queue", "warmup", "trace_limit", "watchdog", "clock_hz",
        ],
    ),
    ("run", &["seed", "queries", "query_file", "mode", "repetitions"]),
    ("output", &["dir"]),
];

/// Drops a trailing `# ...` or `; ...` comment.
fn strip_comment(value: &str) -> &str {
    let cut = value
        .char_indices()
        .find(|&(i, c)| (c == '#' || c == ';') && value[..i].ends_with(char::is_whitespace))
        .map_or(value.len(), |(i, _)| i);
    &value[..cut]
}

/// Flat `section.key -> value` view of a config file plus overrides.
#[derive(Debug, Clone, Default)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let ini = ini::Ini::load_from_file(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let mut s = Settings::default();
        for (section, props) in &ini {
            for (key, value) in props.iter() {
                let section = section.ok_or_else(|| {
                    CliError::Usage(format!("{}: key `{key}` outside any section", path.display()))
                })?;
                s.set(&format!("{section}.{key}"), strip_comment(value))?;
            }
        }
        Ok(s)
    }

    /// Rejects keys that no section defines.
    pub fn set(&mut self, dotted: &str, value: &str) -> Result<(), CliError> {
        let (section, key) = dotted
            .split_once('.')
            .ok_or_else(|| CliError::Usage(format!("expected section.key, got `{dotted}`")))?;
        let known = KEYS
            .iter()
            .any(|(s, keys)| *s == section && keys.contains(&key));
        if !known {
            return Err(CliError::Usage(format!("unknown setting `{dotted}`")));
        }
        self.0.insert(dotted.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn set_opt<T: ToString>(&mut self, dotted: &str, value: Option<T>) -> Result<(), CliError> {
        match value {
            Some(v) => self.set(dotted, &v.to_string()),
            None => Ok(()),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("`{key}` = `{v}`: {e}")))
            })
            .transpose()
    }

    fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    /// Edge list, or a binary cache when the name ends in `.csr`.
    File(PathBuf),
    Rmat {
        params: RmatParams,
        seed: u64,
        weighted: bool,
    },
}

impl GraphSource {
    pub fn label(&self) -> String {
        match self {
            GraphSource::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "graph".into()),
            GraphSource::Rmat { params, .. } => params.label(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeSource {
    None,
    File(PathBuf),
    /// Vertex `v` gets type `v mod k`.
    Modulo(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Combined,
    SchedulerOnly,
    AsyncOnly,
    Baseline,
}

impl Mode {
    /// Slowest first.
    pub const ALL: [Mode; 4] = [Mode::Baseline, Mode::SchedulerOnly, Mode::AsyncOnly, Mode::Combined];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Combined => "combined",
            Mode::SchedulerOnly => "scheduler-only",
            Mode::AsyncOnly => "async-only",
            Mode::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}` (combined, scheduler-only, async-only, baseline)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub types: TypeSource,
    pub params: AlgoParams,
    pub n_pipelines: usize,
    pub pipeline_fifo_depth: Option<usize>,
    pub feedback_delay: Option<usize>,
    pub mapping: ChannelMapping,
    pub block_mode: BlockMode,
    pub mem: MemConfig,
    pub max_live: Option<usize>,
    pub warmup: Option<u64>,
    pub trace_limit: usize,
    pub watchdog_cycles: u64,
    pub clock_hz: f64,
    pub seed: u64,
    pub queries: usize,
    pub query_file: Option<PathBuf>,
    pub mode: Mode,
    pub repetitions: usize,
    pub out: PathBuf,
}

fn parse_mapping(s: &str) -> Result<ChannelMapping, CliError> {
    match s {
        "partitioned" => Ok(ChannelMapping::Partitioned),
        "private" => Ok(ChannelMapping::Private),
        _ => Err(CliError::Usage(format!("unknown mapping `{s}` (partitioned, private)"))),
    }
}

fn parse_bool(key: &str, s: &str) -> Result<bool, CliError> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Usage(format!("`{key}` = `{s}`: expected true or false"))),
    }
}

impl ExperimentConfig {
    /// Parses and validates; nothing is computed or written here.
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let graph = match (s.raw("graph.file"), s.get::<u32>("graph.rmat_scale")?) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage("set either graph.file or graph.rmat_scale, not both".into()))
            }
            (Some(f), None) => GraphSource::File(PathBuf::from(f)),
            (None, Some(scale)) => {
                let ef = s.get_or("graph.rmat_edge_factor", 16u32)?;
                let mut params = match s.raw("graph.rmat_kind").unwrap_or("balanced") {
                    "balanced" => RmatParams::balanced(scale, ef),
                    "graph500" => RmatParams::graph500(scale, ef),
                    k => return Err(CliError::Usage(format!("unknown rmat_kind `{k}` (balanced, graph500)"))),
                };
                if let Some(a) = s.get::<f64>("graph.rmat_a")? {
                    params.a = a;
                    params.b = s.get_or("graph.rmat_b", (1.0 - a) / 3.0)?;
                    params.c = s.get_or("graph.rmat_c", (1.0 - a) / 3.0)?;
                    params.d = 1.0 - params.a - params.b - params.c;
                }
                if let Some(v) = s.raw("graph.scramble") {
                    params.scramble = parse_bool("graph.scramble", v)?;
                }
                params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
                let weighted = match s.raw("graph.weighted") {
                    Some(v) => parse_bool("graph.weighted", v)?,
                    None => false,
                };
                GraphSource::Rmat {
                    params,
                    seed: s.get_or("graph.graph_seed", 1u64)?,
                    weighted,
                }
            }
            (None, None) => return Err(CliError::Usage("no graph: set graph.file or graph.rmat_scale".into())),
        };
        let types = match s.raw("graph.types") {
            None => TypeSource::None,
            Some(v) => match v.strip_prefix("mod:") {
                Some(k) => TypeSource::Modulo(
                    k.parse()
                        .ok()
                        .filter(|&k: &u32| k > 0)
                        .ok_or_else(|| CliError::Usage(format!("bad type spec `{v}`")))?,
                ),
                None => TypeSource::File(PathBuf::from(v)),
            },
        };

        let kind: AlgoKind = s.get_or("algo.name", AlgoKind::Urw)?;
        let mut params = AlgoParams::new(kind);
        params.alpha = s.get_or("algo.alpha", params.alpha)?;
        params.p = s.get_or("algo.p", params.p)?;
        params.q = s.get_or("algo.q", params.q)?;
        params.max_len = s.get_or("algo.max_len", params.max_len)?;
        if let Some(schema) = s.raw("algo.schema") {
            params.schema = schema
                .split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("`algo.schema` = `{schema}`: {e}")))?;
        }
        params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if kind == AlgoKind::MetaPath && types == TypeSource::None {
            return Err(CliError::Usage("metapath walks need graph.types".into()));
        }

        let defaults = MemConfig::default();
        let mem = MemConfig {
            fixed_latency: s.get_or("sim.fixed_latency", defaults.fixed_latency)?,
            jitter_window: s.get_or("sim.jitter_window", defaults.jitter_window)?,
            service_interval: s.get_or("sim.service_interval", defaults.service_interval)?,
            max_outstanding: s.get_or("sim.max_outstanding", defaults.max_outstanding)?,
            txn_ids: s.get_or("sim.txn_ids", defaults.txn_ids)?,
            meta_queue: s.get_or("sim.meta_queue", defaults.meta_queue)?,
        };
        let block_mode = match s.get::<u64>("sim.block_edges")? {
            None | Some(0) => BlockMode::WholeList,
            Some(k) => BlockMode::Edges(k),
        };
        let seed = s
            .get::<u64>("run.seed")?
            .ok_or_else(|| CliError::Usage("a seed is required (run.seed or --seed)".into()))?;
        let cfg = Self {
            graph,
            types,
            params,
            n_pipelines: s.get_or("sim.pipelines", 16usize)?,
            pipeline_fifo_depth: s.get("sim.fifo_depth")?,
            feedback_delay: s.get("sim.feedback_delay")?,
            mapping: parse_mapping(s.raw("sim.mapping").unwrap_or("partitioned"))?,
            block_mode,
            mem,
            max_live: s.get("sim.max_live")?,
            warmup: s.get("sim.warmup")?,
            trace_limit: s.get_or("sim.trace_limit", 0usize)?,
            watchdog_cycles: s.get_or("sim.watchdog", 100_000u64)?,
            clock_hz: s.get_or("sim.clock_hz", 1e9)?,
            seed,
            queries: s.get_or("run.queries", 10_000usize)?,
            query_file: s.raw("run.query_file").map(PathBuf::from),
            mode: s.get_or("run.mode", Mode::Combined)?,
            repetitions: s.get_or("run.repetitions", 1usize)?,
            out: PathBuf::from(s.raw("output.dir").unwrap_or("out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.repetitions == 0 {
            return Err(CliError::Usage("run.repetitions must be at least 1".into()));
        }
        if !(self.clock_hz > 0.0) {
            return Err(CliError::Usage("sim.clock_hz must be positive".into()));
        }
        self.sim_config(self.seed)
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for path in [
            match &self.graph {
                GraphSource::File(p) => Some(p),
                _ => None,
            },
            match &self.types {
                TypeSource::File(p) => Some(p),
                _ => None,
            },
            self.query_file.as_ref(),
        ]
        .into_iter()
        .flatten()
        {
            if !path.is_file() {
                return Err(CliError::Input(format!("{}: no such file", path.display())));
            }
        }
        Ok(())
    }

    pub fn sim_config(&self, seed: u64) -> SimConfig {
        let mut c = SimConfig::new(self.n_pipelines, self.params.clone(), seed);
        c.pipeline_fifo_depth = self.pipeline_fifo_depth;
        c.feedback_delay = self.feedback_delay;
        c.mapping = self.mapping;
        c.mem = self.mem;
        c.max_live = self.max_live;
        c.warmup = self.warmup;
        c.trace_limit = self.trace_limit;
        c.watchdog_cycles = self.watchdog_cycles;
        c
    }

    /// Seed of repetition `rep`.
    pub fn rep_seed(&self, rep: usize) -> u64 {
        self.seed.wrapping_add(rep as u64)
    }
}
