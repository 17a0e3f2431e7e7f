use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use ogc_core::complex::{Constraints, SliceParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Basis sizes per slice
    Enumerate,
    /// Homology dimensions per loop order and vertex count
    Homology,
    /// Check that consecutive differentials compose to zero
    VerifyDsq,
    /// Check dh = hd on every GC basis element
    VerifyChain,
    /// Compare GC homology with the special complex through h
    VerifyThm1,
    /// Full vs min-valence-2 homology, and acyclicity of the tadpole and
    /// multi-edge subcomplexes
    VerifyProps,
}

impl Command {
    pub fn is_check(self) -> bool {
        !matches!(self, Command::Enumerate | Command::Homology)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Inclusive vertex range `LO:HI`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: usize,
    pub hi: usize,
}

impl Window {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = usize> {
        self.lo.max(1)..=self.hi
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Window, String> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad vertex count `{t}`"));
        Ok(Window { lo: parse(lo)?, hi: parse(hi)? })
    }
}

#[derive(Parser, Debug)]
#[command(name = "ogc", version, about = "Exact computations in multi-oriented graph complexes")]
pub struct Args {
    #[arg(long, value_enum)]
    pub command: Command,

    /// Degree parameter n; only its parity affects signs
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    pub n: i64,

    /// Number of colors k
    #[arg(long, default_value_t = 0)]
    pub colors: usize,

    #[arg(long, default_value_t = 4)]
    pub vertices_max: usize,

    #[arg(long, default_value_t = 6)]
    pub edges_max: usize,

    /// Restrict to loop order b = e - v
    #[arg(long, allow_negative_numbers = true)]
    pub loop_order: Option<i64>,

    /// Preset (full, min2, gc, none) or comma separated constraint names
    #[arg(long, default_value = "full")]
    pub constraints: String,

    /// Vertex range LO:HI, clipped to --vertices-max
    #[arg(long)]
    pub window: Option<Window>,

    #[arg(long, env = "OGC_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    pub output: OutputFormat,

    #[arg(long, default_value_t = 1)]
    pub workers: usize,

    /// Lift the enumeration bounds (v <= 8, e <= 12, k <= 2)
    #[arg(long)]
    pub force: bool,

    /// With enumerate, also list the basis graphs
    #[arg(long)]
    pub graphs: bool,
}

/// The parameters that determine a result; these, with the command, form
/// the cache key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub n: i64,
    pub colors: usize,
    pub window: Window,
    pub edges_max: usize,
    pub loop_order: Option<i64>,
    pub constraints: String,
    pub graphs: bool,
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub command: Command,
    pub params: Params,
    pub constraints: Constraints,
    pub cache_dir: Option<PathBuf>,
    pub output: OutputFormat,
    pub workers: usize,
}

impl JobConfig {
    pub fn from_args(args: Args) -> Result<JobConfig, CliError> {
        let constraints: Constraints = args.constraints.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
        if args.workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        let window = match args.window {
            Some(w) => Window { lo: w.lo, hi: w.hi.min(args.vertices_max) },
            None => Window { lo: 1, hi: args.vertices_max },
        };
        SliceParams::new(args.vertices_max, args.edges_max, args.colors, args.n, constraints)
            .check(args.force)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(dir) = &args.cache_dir {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cache dir {}: {e}", dir.display())))?;
        }
        Ok(JobConfig {
            command: args.command,
            params: Params {
                n: args.n,
                colors: args.colors,
                window,
                edges_max: args.edges_max,
                loop_order: args.loop_order,
                constraints: constraints.to_string(),
                graphs: args.graphs,
            },
            constraints,
            cache_dir: args.cache_dir,
            output: args.output,
            workers: args.workers,
        })
    }

    /// Loop orders to visit: the requested one, or every value with a slice
    /// in the window. Trees have b = -1.
    pub fn loop_orders(&self) -> Vec<i64> {
        match self.params.loop_order {
            Some(b) => vec![b],
            None if self.params.window.is_empty() => Vec::new(),
            None => (-1..=self.params.edges_max as i64 - self.params.window.lo.max(1) as i64).collect(),
        }
    }

    /// Edge counts to visit for `v` vertices.
    pub fn edge_counts(&self, v: usize) -> Vec<usize> {
        match self.params.loop_order {
            Some(b) => {
                let e = v as i64 + b;
                if e >= 0 && e as usize <= self.params.edges_max {
                    vec![e as usize]
                } else {
                    Vec::new()
                }
            }
            None => (0..=self.params.edges_max).collect(),
        }
    }

    pub fn slice(&self, v: usize, e: usize) -> SliceParams {
        SliceParams::new(v, e, self.params.colors, self.params.n, self.constraints)
    }
}
