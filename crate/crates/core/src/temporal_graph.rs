//! Ingestion and indexing of dynamic multigraph edge records.
//!
//! Records are `(src, dst, timestamp)` triples. Self loops and repeated
//! triples are dropped during ingestion and counted in [`IngestStats`].
//! Vertex labels from the input are compacted to dense ids in order of first
//! appearance.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type EdgeId = u32;
pub type VertexId = u32;
/// Integer seconds.
pub type Timestamp = u64;

/// One timestamped directed record `src -> dst` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub src: VertexId,
    pub dst: VertexId,
    pub t: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IngestStats {
    pub records_read: u64,
    pub self_loops_dropped: u64,
    pub duplicates_dropped: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// `SRC DST UNIXTS` separated by arbitrary whitespace, `#`/`%` comments allowed.
    SnapWhitespace,
    /// `src,dst,timestamp` with an optional header row.
    Csv,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "snap" | "snap_whitespace" => Ok(InputFormat::SnapWhitespace),
            "csv" => Ok(InputFormat::Csv),
            other => Err(format!("unknown input format `{other}` (expected snap or csv)")),
        }
    }
}

/// A dynamic multigraph with dense vertex ids and edge ids in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicMultigraph {
    edges: Vec<EdgeRecord>,
    labels: Vec<u64>,
    stats: IngestStats,
}

impl DynamicMultigraph {
    /// Builds a graph from raw `(src label, dst label, t)` triples, applying
    /// the self-loop and duplicate rules.
    pub fn from_triples<I>(triples: I) -> Self
    where
        I: IntoIterator<Item = (u64, u64, Timestamp)>,
    {
        let mut builder = GraphBuilder::default();
        for (s, d, t) in triples {
            builder.push(s, d, t);
        }
        builder.finish()
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &EdgeRecord {
        &self.edges[id as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Original input label of a dense vertex id.
    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn stats(&self) -> IngestStats {
        self.stats
    }

    pub fn time_span(&self) -> Option<(Timestamp, Timestamp)> {
        let min = self.edges.iter().map(|e| e.t).min()?;
        let max = self.edges.iter().map(|e| e.t).max()?;
        Some((min, max))
    }
}

#[derive(Default)]
struct GraphBuilder {
    edges: Vec<EdgeRecord>,
    labels: Vec<u64>,
    ids: HashMap<u64, VertexId>,
    seen: HashSet<(u64, u64, Timestamp)>,
    stats: IngestStats,
}

impl GraphBuilder {
    fn vertex(&mut self, label: u64) -> VertexId {
        let next = self.labels.len() as VertexId;
        *self.ids.entry(label).or_insert_with(|| {
            self.labels.push(label);
            next
        })
    }

    fn push(&mut self, src: u64, dst: u64, t: Timestamp) {
        self.stats.records_read += 1;
        if src == dst {
            self.stats.self_loops_dropped += 1;
            return;
        }
        if !self.seen.insert((src, dst, t)) {
            self.stats.duplicates_dropped += 1;
            return;
        }
        let id = self.edges.len() as EdgeId;
        let src = self.vertex(src);
        let dst = self.vertex(dst);
        self.edges.push(EdgeRecord { id, src, dst, t });
    }

    fn finish(self) -> DynamicMultigraph {
        DynamicMultigraph {
            edges: self.edges,
            labels: self.labels,
            stats: self.stats,
        }
    }
}

fn parse_field(tok: &str, what: &str, line: usize) -> Result<u64> {
    tok.trim().parse::<u64>().map_err(|_| Error::Parse {
        line,
        msg: format!("{what} `{}` is not a non-negative integer", tok.trim()),
    })
}

/// Reads an edge list. Errors on malformed lines (with 1-based line number)
/// and on input that yields no records at all.
pub fn parse_edge_list<R: BufRead>(reader: R, format: InputFormat) -> Result<DynamicMultigraph> {
    let mut builder = GraphBuilder::default();
    match format {
        InputFormat::SnapWhitespace => {
            for (idx, line) in reader.lines().enumerate() {
                let line = line?;
                let lineno = idx + 1;
                let body = line.trim();
                if body.is_empty() || body.starts_with('#') || body.starts_with('%') {
                    continue;
                }
                let toks: Vec<&str> = body.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected 3 fields, found {}", toks.len()),
                    });
                }
                let s = parse_field(toks[0], "source", lineno)?;
                let d = parse_field(toks[1], "destination", lineno)?;
                let t = parse_field(toks[2], "timestamp", lineno)?;
                builder.push(s, d, t);
            }
        }
        InputFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .trim(csv::Trim::All)
                .from_reader(reader);
            for (idx, row) in rdr.records().enumerate() {
                let row = row?;
                let lineno = row.position().map(|p| p.line() as usize).unwrap_or(idx + 1);
                if row.iter().all(|f| f.is_empty()) {
                    continue;
                }
                if row.len() != 3 {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected 3 columns, found {}", row.len()),
                    });
                }
                // header row
                if idx == 0 && row[0].parse::<u64>().is_err() {
                    continue;
                }
                let s = parse_field(&row[0], "source", lineno)?;
                let d = parse_field(&row[1], "destination", lineno)?;
                let t = parse_field(&row[2], "timestamp", lineno)?;
                builder.push(s, d, t);
            }
        }
    }
    if builder.stats.records_read == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(builder.finish())
}

/// Writes the graph back out as `SRC DST TS` lines using the original labels.
pub fn write_snap<W: std::io::Write>(g: &DynamicMultigraph, mut w: W) -> std::io::Result<()> {
    for e in g.edges() {
        writeln!(w, "{} {} {}", g.label(e.src), g.label(e.dst), e.t)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IncidenceEntry {
    pub edge: EdgeId,
    pub dir: Direction,
    pub t: Timestamp,
}

impl IncidenceEntry {
    /// Canonical order: time, then in-edges before out-edges, then edge id.
    fn key(&self) -> (Timestamp, Direction, EdgeId) {
        (self.t, self.dir, self.edge)
    }
}

/// Time-sorted incidence of one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceList {
    pub vertex: VertexId,
    pub entries: Vec<IncidenceEntry>,
}

impl IncidenceList {
    pub fn in_degree(&self) -> usize {
        self.entries.iter().filter(|e| e.dir == Direction::In).count()
    }

    pub fn out_degree(&self) -> usize {
        self.entries.len() - self.in_degree()
    }
}

/// One incidence list per vertex, each in canonical order. Lists are sorted
/// in parallel on the current rayon pool; each list has exactly one writer.
pub fn build_incidence(g: &DynamicMultigraph) -> Vec<IncidenceList> {
    let mut lists: Vec<IncidenceList> = (0..g.vertex_count())
        .map(|v| IncidenceList {
            vertex: v as VertexId,
            entries: Vec::new(),
        })
        .collect();
    let mut degree = vec![0usize; g.vertex_count()];
    for e in g.edges() {
        degree[e.src as usize] += 1;
        degree[e.dst as usize] += 1;
    }
    for (list, d) in lists.iter_mut().zip(&degree) {
        list.entries.reserve_exact(*d);
    }
    for e in g.edges() {
        lists[e.src as usize].entries.push(IncidenceEntry {
            edge: e.id,
            dir: Direction::Out,
            t: e.t,
        });
        lists[e.dst as usize].entries.push(IncidenceEntry {
            edge: e.id,
            dir: Direction::In,
            t: e.t,
        });
    }
    lists
        .par_iter_mut()
        .for_each(|l| l.entries.sort_unstable_by_key(IncidenceEntry::key));
    lists
}
