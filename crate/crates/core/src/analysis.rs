//! Per-cluster and corpus-level statistics, emitted as CSV plot data.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extraction::{ClusterAssignment, NOISE};
use crate::temporal_graph::{DynamicMultigraph, EdgeRecord, Timestamp};

pub const SECONDS_PER_DAY: u64 = 86_400;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterSummary {
    pub id: i64,
    pub size: usize,
    pub duration_s: u64,
    pub participants: usize,
    pub start: Timestamp,
    pub end: Timestamp,
}

fn check_consistent(a: &ClusterAssignment, g: &DynamicMultigraph) -> Result<()> {
    if a.labels.len() != g.edge_count() {
        return Err(Error::Mismatch(format!(
            "assignment has {} labels for {} records",
            a.labels.len(),
            g.edge_count()
        )));
    }
    if let Some(&bad) = a.labels.iter().find(|&&l| l < NOISE || l >= a.cluster_count as i64) {
        return Err(Error::UnknownCluster(bad));
    }
    Ok(())
}

/// One summary per cluster, in cluster id order.
pub fn summarize_clusters(a: &ClusterAssignment, g: &DynamicMultigraph) -> Result<Vec<ClusterSummary>> {
    check_consistent(a, g)?;
    let mut out: Vec<ClusterSummary> = (0..a.cluster_count as i64)
        .map(|id| ClusterSummary {
            id,
            size: 0,
            duration_s: 0,
            participants: 0,
            start: Timestamp::MAX,
            end: 0,
        })
        .collect();
    let mut people: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); a.cluster_count];
    for (e, &l) in g.edges().iter().zip(&a.labels) {
        if l == NOISE {
            continue;
        }
        let s = &mut out[l as usize];
        s.size += 1;
        s.start = s.start.min(e.t);
        s.end = s.end.max(e.t);
        people[l as usize].insert(e.src);
        people[l as usize].insert(e.dst);
    }
    for (s, p) in out.iter_mut().zip(people) {
        s.participants = p.len();
        s.duration_s = s.end.saturating_sub(s.start);
    }
    Ok(out)
}

/// Number of distinct clusters touching each vertex, indexed by dense vertex id.
pub fn membership_counts(a: &ClusterAssignment, g: &DynamicMultigraph) -> Result<Vec<usize>> {
    check_consistent(a, g)?;
    let mut seen: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); g.vertex_count()];
    for (e, &l) in g.edges().iter().zip(&a.labels) {
        if l != NOISE {
            seen[e.src as usize].insert(l);
            seen[e.dst as usize].insert(l);
        }
    }
    Ok(seen.into_iter().map(|s| s.len()).collect())
}

/// Active cluster count per day index `t / day_length`.
pub fn activity_by_day(a: &ClusterAssignment, g: &DynamicMultigraph, day_length: u64) -> Result<BTreeMap<u64, usize>> {
    check_consistent(a, g)?;
    let mut active: BTreeSet<(u64, i64)> = BTreeSet::new();
    for (e, &l) in g.edges().iter().zip(&a.labels) {
        if l != NOISE {
            active.insert((e.t / day_length, l));
        }
    }
    let mut out = BTreeMap::new();
    for (day, _) in active {
        *out.entry(day).or_insert(0) += 1;
    }
    Ok(out)
}

/// Member records of one cluster in time order.
pub fn induced_subgraph(id: i64, a: &ClusterAssignment, g: &DynamicMultigraph) -> Result<Vec<EdgeRecord>> {
    check_consistent(a, g)?;
    if id < 0 || id >= a.cluster_count as i64 {
        return Err(Error::UnknownCluster(id));
    }
    let mut rows: Vec<EdgeRecord> = g
        .edges()
        .iter()
        .zip(&a.labels)
        .filter(|(_, &l)| l == id)
        .map(|(e, _)| *e)
        .collect();
    rows.sort_by_key(|e| (e.t, e.id));
    Ok(rows)
}

pub fn write_summaries<W: Write>(rows: &[ClusterSummary], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// `vertex,clusters` using original vertex labels, in label order.
pub fn write_membership<W: Write>(counts: &[usize], g: &DynamicMultigraph, w: W) -> Result<()> {
    let mut rows: Vec<(u64, usize)> = counts
        .iter()
        .enumerate()
        .map(|(v, &c)| (g.label(v as u32), c))
        .collect();
    rows.sort_unstable();
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["vertex", "clusters"])?;
    for (v, c) in rows {
        wtr.write_record([v.to_string(), c.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_daily_activity<W: Write>(days: &BTreeMap<u64, usize>, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["day", "active_clusters"])?;
    for (d, c) in days {
        wtr.write_record([d.to_string(), c.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `edge_id,src,dst,timestamp` rows with original labels.
pub fn write_edge_rows<W: Write>(rows: &[EdgeRecord], g: &DynamicMultigraph, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["edge_id", "src", "dst", "timestamp"])?;
    for e in rows {
        wtr.write_record([
            e.id.to_string(),
            g.label(e.src).to_string(),
            g.label(e.dst).to_string(),
            e.t.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
