use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use edgeclust::analysis::{
    activity_by_day, induced_subgraph, membership_counts, summarize_clusters, write_daily_activity, write_edge_rows,
    write_membership, write_summaries, SECONDS_PER_DAY,
};
use edgeclust::assignment_io::{read_assignment, write_assignment};
use edgeclust::generate::{scale_free, uniform, ScaleFreeConfig, UniformConfig};
use edgeclust::skeleton::{apply_cutoff, build_skeleton, edge_bound, DEFAULT_ORACLE_CAP};
use edgeclust::temporal_graph::parse_edge_list;
use edgeclust::verify::{verify_graph, verify_skeleton};
use edgeclust::{
    cluster_edges, cluster_skeleton, with_workers, ClusterAssignment, DynamicMultigraph, InputFormat, LineGraphSkeleton,
};
use serde_json::json;

use crate::config::{FileConfig, RunConfig};
use crate::{ClusterArgs, GenerateArgs, SkeletonArgs, StatsArgs, VerifyArgs};

pub const ORACLE_CAP_VAR: &str = "EDGECLUST_ORACLE_CAP";

/// A process exit code with an optional diagnostic.
pub struct Failure {
    pub code: u8,
    pub err: Option<anyhow::Error>,
}

pub fn usage(err: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        err: Some(err.into()),
    }
}

fn data(err: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        err: Some(err.into()),
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        data(err)
    }
}

impl From<edgeclust::Error> for Failure {
    fn from(err: edgeclust::Error) -> Self {
        match err {
            edgeclust::Error::MinClusterSize(_) | edgeclust::Error::InvalidThresholds(_) => usage(err),
            _ => data(err),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(w) => with_workers(w, f),
        None => f(),
    }
}

fn run_config(args: &crate::RunArgs) -> Result<RunConfig, Failure> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p).map_err(usage)?,
        None => FileConfig::default(),
    };
    RunConfig::resolve(args.flags(), file).map_err(usage)
}

fn read_graph(path: &Path, format: InputFormat) -> Result<DynamicMultigraph, Failure> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_edge_list(BufReader::new(f), format)
        .map_err(|e| data(anyhow!(e).context(format!("reading {}", path.display()))))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn is_binary(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "bin")
}

fn write_skeleton(s: &LineGraphSkeleton, path: &Path) -> CmdResult {
    let mut w = create(path)?;
    if is_binary(path) {
        s.write_binary(&mut w)?;
    } else {
        s.write_csv(&mut w)?;
    }
    w.flush().context("flushing skeleton")?;
    Ok(())
}

fn read_skeleton(path: &Path, g: &DynamicMultigraph) -> Result<LineGraphSkeleton, Failure> {
    let f = File::open(path).with_context(|| format!("opening skeleton {}", path.display()))?;
    let r = BufReader::new(f);
    let s = if is_binary(path) {
        LineGraphSkeleton::read_binary(r)?
    } else {
        LineGraphSkeleton::read_csv(r, g.edge_count())?
    };
    if s.node_count != g.edge_count() {
        return Err(data(anyhow!(
            "skeleton has {} nodes but the graph has {} records",
            s.node_count,
            g.edge_count()
        )));
    }
    Ok(s)
}

fn parse_format(s: &str) -> Result<InputFormat, Failure> {
    s.parse().map_err(|e: String| usage(anyhow!(e)))
}

/// Summaries, membership and daily activity; shared by `cluster` and `stats`.
fn write_analysis(dir: &Path, a: &ClusterAssignment, g: &DynamicMultigraph) -> CmdResult {
    let summaries = summarize_clusters(a, g)?;
    let mut w = create(&dir.join("summaries.csv"))?;
    write_summaries(&summaries, &mut w)?;
    w.flush().context("flushing summaries")?;
    let mut w = create(&dir.join("membership.csv"))?;
    write_membership(&membership_counts(a, g)?, g, &mut w)?;
    w.flush().context("flushing membership")?;
    let mut w = create(&dir.join("daily_activity.csv"))?;
    write_daily_activity(&activity_by_day(a, g, SECONDS_PER_DAY)?, &mut w)?;
    w.flush().context("flushing daily activity")?;
    Ok(())
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

pub fn cluster(args: ClusterArgs) -> CmdResult {
    let wall = Instant::now();
    let cfg = run_config(&args.run)?;
    let input = cfg.input.clone().ok_or_else(|| usage(anyhow!("--input is required")))?;
    let out_dir = cfg.out.clone().ok_or_else(|| usage(anyhow!("--out is required")))?;
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let cluster_cfg = cfg.cluster_config();

    in_pool(cfg.workers, || {
        let mut phases: Vec<(String, Duration)> = Vec::new();
        let t = Instant::now();
        let g = read_graph(&input, cfg.format)?;
        phases.push(("parse".into(), t.elapsed()));

        let out = match &args.skeleton {
            Some(path) => {
                let t = Instant::now();
                let s = read_skeleton(path, &g)?;
                phases.push(("load_skeleton".into(), t.elapsed()));
                cluster_skeleton(s, &cluster_cfg)?
            }
            None => cluster_edges(&g, &cluster_cfg)?,
        };
        phases.extend(out.timings.phases.iter().cloned());

        let t = Instant::now();
        let mut w = create(&out_dir.join("assignment.csv"))?;
        write_assignment(&out.assignment, &g, &mut w)?;
        w.flush().context("flushing assignment")?;
        let mut w = create(&out_dir.join("condensed_tree.json"))?;
        out.tree.write_json(&mut w)?;
        w.flush().context("flushing condensed tree")?;
        write_analysis(&out_dir, &out.assignment, &g)?;
        if args.dendrogram {
            let mut w = create(&out_dir.join("dendrogram.json"))?;
            out.dendrogram.write_json(&mut w)?;
            w.flush().context("flushing dendrogram")?;
        }
        if args.save_skeleton {
            write_skeleton(&out.skeleton, &out_dir.join("skeleton.csv"))?;
        }
        phases.push(("write".into(), t.elapsed()));

        let stats = g.stats();
        let sizes = out.assignment.cluster_sizes();
        let manifest = json!({
            "config": cfg,
            "dendrogram": if out.exact { "exact" } else { "discrete" },
            "counts": {
                "records_read": stats.records_read,
                "self_loops_dropped": stats.self_loops_dropped,
                "duplicates_dropped": stats.duplicates_dropped,
                "edges": g.edge_count(),
                "vertices": g.vertex_count(),
                "skeleton_nodes": out.skeleton.node_count,
                "skeleton_edges": out.skeleton.edges.len(),
                "skeleton_edge_bound": edge_bound(g.edge_count(), g.vertex_count()),
                "clusters": out.assignment.cluster_count,
                "noise": out.assignment.noise_count(),
                "largest_cluster": sizes.iter().copied().max().unwrap_or(0),
            },
            "phases": phases
                .iter()
                .map(|(name, d)| json!({ "name": name, "seconds": secs(*d) }))
                .collect::<Vec<_>>(),
            "wall_seconds": secs(wall.elapsed()),
        });
        let mut w = create(&out_dir.join("manifest.json"))?;
        serde_json::to_writer_pretty(&mut w, &manifest).context("writing manifest")?;
        w.flush().context("flushing manifest")?;

        println!(
            "{} records, {} skeleton edges, {} clusters, {} noise",
            g.edge_count(),
            out.skeleton.edges.len(),
            out.assignment.cluster_count,
            out.assignment.noise_count()
        );
        Ok(())
    })
}

pub fn skeleton(args: SkeletonArgs) -> CmdResult {
    let cfg = run_config(&args.run)?;
    let input = cfg.input.clone().ok_or_else(|| usage(anyhow!("--input is required")))?;
    let out = cfg.out.clone().ok_or_else(|| usage(anyhow!("--out is required")))?;
    in_pool(cfg.workers, || {
        let g = read_graph(&input, cfg.format)?;
        let mut s = build_skeleton(&g);
        if let Some(max) = cfg.cutoff {
            s = apply_cutoff(&s, max);
        }
        write_skeleton(&s, &out)?;
        println!(
            "{} skeleton nodes, {} skeleton edges (bound {})",
            s.node_count,
            s.edges.len(),
            edge_bound(g.edge_count(), g.vertex_count())
        );
        Ok(())
    })
}

fn dump_ids(spec: &str, count: usize) -> Result<Vec<i64>, Failure> {
    if spec == "all" {
        return Ok((0..count as i64).collect());
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| usage(anyhow!("`{s}` is not a cluster id")))
        })
        .collect()
}

pub fn stats(args: StatsArgs) -> CmdResult {
    let g = read_graph(&args.input, parse_format(&args.format)?)?;
    let f = File::open(&args.assignment).with_context(|| format!("opening {}", args.assignment.display()))?;
    let a = read_assignment(BufReader::new(f), &g)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_analysis(&args.out, &a, &g)?;
    if let Some(spec) = &args.dump {
        for id in dump_ids(spec, a.cluster_count)? {
            let rows = induced_subgraph(id, &a, &g)?;
            let mut w = create(&args.out.join(format!("cluster_{id}.csv")))?;
            write_edge_rows(&rows, &g, &mut w)?;
            w.flush().context("flushing cluster dump")?;
        }
    }
    println!("{} clusters, {} noise", a.cluster_count, a.noise_count());
    Ok(())
}

fn oracle_cap() -> Result<u64, Failure> {
    match std::env::var(ORACLE_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(anyhow!("{ORACLE_CAP_VAR}=`{v}` is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_ORACLE_CAP),
    }
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let cap = oracle_cap()?;
    if args.workers == Some(0) {
        return Err(usage(anyhow!("worker count must be positive")));
    }
    let g = match (&args.input, args.random_seed) {
        (Some(path), _) => {
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            match parse_edge_list(BufReader::new(f), parse_format(&args.format)?) {
                // nothing to check, which passes vacuously
                Err(edgeclust::Error::EmptyInput) => DynamicMultigraph::from_triples(std::iter::empty()),
                r => r?,
            }
        }
        (None, Some(seed)) => uniform(&UniformConfig {
            vertices: args.vertices,
            edges: args.edges,
            time_range: args.time_range,
            seed,
        }),
        (None, None) => return Err(usage(anyhow!("give --input or --random-seed"))),
    };
    let report = in_pool(args.workers, || match &args.skeleton {
        Some(path) => read_skeleton(path, &g).and_then(|s| Ok(verify_skeleton(&g, &s, cap)?)),
        None => Ok(verify_graph(&g, cap)?),
    })?;
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure { code: 3, err: None })
    }
}

pub fn generate(args: GenerateArgs) -> CmdResult {
    let triples = scale_free(&ScaleFreeConfig {
        edges: args.edges,
        max_vertices: args.max_vertices,
        seed: args.seed,
        ..Default::default()
    });
    let out: PathBuf = args.out;
    let mut w = create(&out)?;
    for (s, d, t) in triples {
        writeln!(w, "{s} {d} {t}").context("writing edge list")?;
    }
    w.flush().context("flushing edge list")?;
    Ok(())
}
