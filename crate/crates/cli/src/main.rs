mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Failure;
use crate::config::FlagConfig;

#[derive(Parser)]
#[command(
    name = "edgeclust",
    version,
    about = "Cluster timestamped edge records into conversations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write every artifact.
    Cluster(ClusterArgs),
    /// Build the line graph skeleton and save it.
    Skeleton(SkeletonArgs),
    /// Recompute statistics from a graph and a saved assignment.
    Stats(StatsArgs),
    /// Check a skeleton against the brute-force line graph.
    Verify(VerifyArgs),
    /// Write a seeded synthetic scale-free edge list.
    Generate(GenerateArgs),
}

#[derive(Args, Clone, Default)]
pub struct RunArgs {
    /// Edge list to read.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format: snap or csv.
    #[arg(long)]
    format: Option<String>,
    /// Minimum cluster size.
    #[arg(long)]
    min_cluster_size: Option<usize>,
    /// Dendrogram mode: exact or discrete. Chosen by skeleton size when absent.
    #[arg(long)]
    mode: Option<String>,
    /// geometric:<base>:<max>, list:<w1,w2,...> or quantiles:<n>.
    #[arg(long)]
    thresholds: Option<String>,
    /// Drop skeleton edges with a larger time increment, in seconds.
    #[arg(long)]
    cutoff: Option<u64>,
    /// Worker threads; 1 runs serially.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory (cluster) or file (skeleton).
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with any of the above keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn flags(&self) -> FlagConfig {
        FlagConfig {
            input: self.input.clone(),
            format: self.format.clone(),
            min_cluster_size: self.min_cluster_size,
            mode: self.mode.clone(),
            thresholds: self.thresholds.clone(),
            cutoff: self.cutoff,
            out: self.out.clone(),
            workers: self.workers,
        }
    }
}

#[derive(Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Resume from a skeleton written by `skeleton` (.bin for binary, otherwise CSV).
    #[arg(long)]
    skeleton: Option<PathBuf>,
    /// Also write the skeleton as skeleton.csv.
    #[arg(long)]
    save_skeleton: bool,
    /// Also write the dendrogram as dendrogram.json.
    #[arg(long)]
    dendrogram: bool,
}

#[derive(Args)]
pub struct SkeletonArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
pub struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "snap")]
    format: String,
    /// assignment.csv from a previous `cluster` run.
    #[arg(long)]
    assignment: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Write cluster_<id>.csv for these comma-separated ids, or `all`.
    #[arg(long)]
    dump: Option<String>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "random_seed", required_unless_present = "random_seed")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "snap")]
    format: String,
    /// Verify a seeded random graph instead of a file.
    #[arg(long)]
    random_seed: Option<u64>,
    #[arg(long, default_value_t = 50)]
    vertices: u64,
    #[arg(long, default_value_t = 500)]
    edges: usize,
    #[arg(long, default_value_t = 1000)]
    time_range: u64,
    /// Check this saved skeleton instead of building one.
    #[arg(long)]
    skeleton: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 1_000_000)]
    edges: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    max_vertices: usize,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Cluster(a) => commands::cluster(a),
        Command::Skeleton(a) => commands::skeleton(a),
        Command::Stats(a) => commands::stats(a),
        Command::Verify(a) => commands::verify(a),
        Command::Generate(a) => commands::generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, err }) => {
            if let Some(err) = err {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(code)
        }
    }
}
