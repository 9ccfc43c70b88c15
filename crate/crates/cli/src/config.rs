//! Run configuration: command-line flags over an optional TOML file over defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use edgeclust::{ClusterConfig, DendrogramMode, InputFormat, ThresholdSpec, Weight};
use serde::{Deserialize, Serialize};

/// Keys accepted in a `--config` file. All optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub format: Option<String>,
    pub min_cluster_size: Option<usize>,
    pub mode: Option<String>,
    pub thresholds: Option<String>,
    pub cutoff: Option<Weight>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// The same keys as given on the command line.
#[derive(Debug, Default, Clone)]
pub struct FlagConfig {
    pub input: Option<PathBuf>,
    pub format: Option<String>,
    pub min_cluster_size: Option<usize>,
    pub mode: Option<String>,
    pub thresholds: Option<String>,
    pub cutoff: Option<Weight>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    Auto,
    Exact,
    Discrete,
}

fn parse_mode(s: &str) -> anyhow::Result<ModeChoice> {
    Ok(match s {
        "auto" => ModeChoice::Auto,
        "exact" => ModeChoice::Exact,
        "discrete" => ModeChoice::Discrete,
        other => bail!("unknown mode `{other}` (expected exact or discrete)"),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    #[serde(serialize_with = "format_name")]
    pub format: InputFormat,
    pub min_cluster_size: usize,
    pub mode: ModeChoice,
    #[serde(serialize_with = "display")]
    pub thresholds: ThresholdSpec,
    pub cutoff: Option<Weight>,
    pub out: Option<PathBuf>,
    /// `None` uses every available core.
    pub workers: Option<usize>,
}

fn format_name<S: serde::Serializer>(f: &InputFormat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match f {
        InputFormat::SnapWhitespace => "snap",
        InputFormat::Csv => "csv",
    })
}

fn display<S: serde::Serializer>(t: &ThresholdSpec, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(t)
}

impl RunConfig {
    /// Validation failures here are usage errors.
    pub fn resolve(flags: FlagConfig, file: FileConfig) -> anyhow::Result<Self> {
        let format = match flags.format.or(file.format) {
            Some(f) => f.parse().map_err(anyhow::Error::msg)?,
            None => InputFormat::SnapWhitespace,
        };
        let mode = match flags.mode.or(file.mode) {
            Some(m) => parse_mode(&m)?,
            None => ModeChoice::Auto,
        };
        let thresholds = match flags.thresholds.or(file.thresholds) {
            Some(t) => t.parse().map_err(anyhow::Error::msg)?,
            None => ThresholdSpec::default(),
        };
        let min_cluster_size = flags.min_cluster_size.or(file.min_cluster_size).unwrap_or(5);
        if min_cluster_size < 2 {
            bail!("minimum cluster size must be at least 2, got {min_cluster_size}");
        }
        if let ThresholdSpec::List(ws) = &thresholds {
            if ws.windows(2).any(|w| w[0] >= w[1]) {
                bail!("threshold list must be strictly increasing");
            }
        }
        let workers = flags.workers.or(file.workers);
        if workers == Some(0) {
            bail!("worker count must be positive");
        }
        Ok(RunConfig {
            input: flags.input.or(file.input),
            format,
            min_cluster_size,
            mode,
            thresholds,
            cutoff: flags.cutoff.or(file.cutoff),
            out: flags.out.or(file.out),
            workers,
        })
    }

    pub fn cluster_config(&self) -> ClusterConfig {
        let spec = self.thresholds.clone();
        ClusterConfig {
            min_cluster_size: self.min_cluster_size,
            mode: match self.mode {
                ModeChoice::Auto => DendrogramMode::Auto(spec),
                ModeChoice::Exact => DendrogramMode::Exact,
                ModeChoice::Discrete => DendrogramMode::Discrete(spec),
            },
            cutoff: self.cutoff,
        }
    }
}
