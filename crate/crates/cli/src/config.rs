//! Run configuration: command-line flags over an optional `key=value` file
//! over built-in defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use quatl1::SolverOptions;

#[derive(Debug, Parser)]
#[command(name = "quatl1", version, about = "Sparse quaternion signal recovery by l1 minimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Recover a signal from an instance CSV (`kind,row,col,re,im_i,im_j,im_k`).
    Recover(Flags),
    /// Run one planted trial and write the original and recovered signals.
    Demo(Flags),
    /// Sweep recovery rates over an (n, s) grid.
    Sweep(Flags),
    /// Render a sweep CSV as an SVG heatmap.
    Plot(Flags),
}

impl CliCommand {
    pub fn split(self) -> (Command, Flags) {
        match self {
            CliCommand::Recover(f) => (Command::Recover, f),
            CliCommand::Demo(f) => (Command::Demo, f),
            CliCommand::Sweep(f) => (Command::Sweep, f),
            CliCommand::Plot(f) => (Command::Plot, f),
        }
    }
}

/// Flags shared by every command. Unset flags fall back to the config file,
/// then to defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Signal length (columns of A).
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of measurements (rows of A).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of nonzero signal entries.
    #[arg(long)]
    pub s: Option<usize>,
    /// Trials per sweep cell.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol_feas: Option<f64>,
    #[arg(long)]
    pub tol_gap: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Input file (recover, plot).
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Comma-separated measurement counts for sweeps.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Comma-separated sparsity levels for sweeps. Without it each n row
    /// covers s = 1..=n.
    #[arg(long, value_delimiter = ',')]
    pub s_list: Option<Vec<usize>>,
    /// Extra per-trial CSV for sweeps.
    #[arg(long)]
    pub trials_out: Option<PathBuf>,
    /// Extra instance CSV for demo, readable by `recover`.
    #[arg(long)]
    pub instance_out: Option<PathBuf>,
    /// `key=value` file; keys are flag names without the leading dashes.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad count {t:?}: {e}")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Recover,
    Demo,
    Sweep,
    Plot,
}

impl Command {
    fn default_out(self) -> &'static str {
        match self {
            Command::Recover => "recovered.csv",
            Command::Demo => "demo.csv",
            Command::Sweep => "sweep.csv",
            Command::Plot => "heatmap.svg",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Recover => "recover",
            Command::Demo => "demo",
            Command::Sweep => "sweep",
            Command::Plot => "plot",
        })
    }
}

pub const DEFAULT_M: usize = 256;
pub const DEFAULT_N: usize = 128;
pub const DEFAULT_S: usize = 60;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_N_LIST: [usize; 5] = [8, 16, 32, 64, 128];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub solver: SolverOptions,
    pub output_path: PathBuf,
    pub input_path: Option<PathBuf>,
    pub n_list: Vec<usize>,
    pub s_list: Option<Vec<usize>>,
    pub trials_out: Option<PathBuf>,
    pub instance_out: Option<PathBuf>,
}

const KEYS: [&str; 14] = [
    "m", "n", "s", "trials", "seed", "tol-feas", "tol-gap", "max-iters", "out", "in", "n-list", "s-list",
    "trials-out", "instance-out",
];

/// Parses `key=value` lines. Blank lines and lines starting with `#` are
/// skipped; keys may use `-` or `_`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("line {}: expected key=value, got {raw:?}", i + 1);
        };
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            bail!("line {}: unknown key {:?}", i + 1, k.trim());
        }
        if out.insert(key, v.trim().to_string()).is_some() {
            bail!("line {}: duplicate key {:?}", i + 1, k.trim());
        }
    }
    Ok(out)
}

fn from_file<T: FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|e| anyhow::anyhow!("config key {key}: {e}")))
        .transpose()
}

fn list_from_file(file: &BTreeMap<String, String>, key: &str) -> Result<Option<Vec<usize>>> {
    file.get(key)
        .map(|v| parse_list(v).map_err(|e| anyhow::anyhow!("config key {key}: {e}")))
        .transpose()
}

impl RunConfig {
    /// Merges flags, the config file named by `--config` and defaults.
    pub fn resolve(command: Command, flags: Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read config file {}", path.display()))?;
                parse_config_file(&text).with_context(|| format!("in config file {}", path.display()))?
            }
            None => BTreeMap::new(),
        };
        Self::merge(command, flags, &file)
    }

    pub fn merge(command: Command, flags: Flags, file: &BTreeMap<String, String>) -> Result<Self> {
        let defaults = SolverOptions::default();
        let solver = SolverOptions {
            tol_feas: pick(flags.tol_feas, from_file(file, "tol-feas")?, defaults.tol_feas),
            tol_gap: pick(flags.tol_gap, from_file(file, "tol-gap")?, defaults.tol_gap),
            max_iterations: pick(flags.max_iters, from_file(file, "max-iters")?, defaults.max_iterations),
            ..defaults
        };
        solver.validate()?;
        let cfg = Self {
            command,
            m: pick(flags.m, from_file(file, "m")?, DEFAULT_M),
            n: pick(flags.n, from_file(file, "n")?, DEFAULT_N),
            s: pick(flags.s, from_file(file, "s")?, DEFAULT_S),
            trials: pick(flags.trials, from_file(file, "trials")?, DEFAULT_TRIALS),
            base_seed: pick(flags.seed, from_file(file, "seed")?, DEFAULT_SEED),
            solver,
            output_path: pick(flags.out, from_file(file, "out")?, PathBuf::from(command.default_out())),
            input_path: flags.input.or(from_file(file, "in")?),
            n_list: pick(flags.n_list, list_from_file(file, "n-list")?, DEFAULT_N_LIST.to_vec()),
            s_list: flags.s_list.or(list_from_file(file, "s-list")?),
            trials_out: flags.trials_out.or(from_file(file, "trials-out")?),
            instance_out: flags.instance_out.or(from_file(file, "instance-out")?),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the fields each command needs.
    pub fn validate(&self) -> Result<()> {
        match self.command {
            Command::Recover | Command::Plot => {
                let Some(input) = &self.input_path else {
                    bail!("{} needs --in", self.command);
                };
                if same_file(input, &self.output_path) {
                    bail!("--out must differ from --in");
                }
            }
            Command::Demo => quatl1::TrialSpec::new(self.m, self.n, self.s, self.base_seed).map(drop)?,
            Command::Sweep => {
                if self.n_list.is_empty() {
                    bail!("--n-list is empty");
                }
                if matches!(&self.s_list, Some(l) if l.is_empty()) {
                    bail!("--s-list is empty");
                }
                if self.trials == 0 {
                    bail!("--trials must be at least 1");
                }
            }
        }
        let extras = [&self.trials_out, &self.instance_out];
        for extra in extras.into_iter().flatten() {
            if same_file(extra, &self.output_path) {
                bail!("{} is named as two outputs", extra.display());
            }
        }
        Ok(())
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}
