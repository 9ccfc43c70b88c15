//! Assignment CSV: `edge_id,src,dst,timestamp,cluster_id` with `-1` for noise.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::{ClusterAssignment, NOISE};
use crate::temporal_graph::DynamicMultigraph;

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    edge_id: u32,
    src: u64,
    dst: u64,
    timestamp: u64,
    cluster_id: i64,
}

pub fn write_assignment<W: Write>(a: &ClusterAssignment, g: &DynamicMultigraph, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for (e, &l) in g.edges().iter().zip(&a.labels) {
        wtr.serialize(Row {
            edge_id: e.id,
            src: g.label(e.src),
            dst: g.label(e.dst),
            timestamp: e.t,
            cluster_id: l,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads an assignment and checks every row against the record it names.
pub fn read_assignment<R: Read>(r: R, g: &DynamicMultigraph) -> Result<ClusterAssignment> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut labels = vec![None; g.edge_count()];
    for row in rdr.deserialize() {
        let row: Row = row?;
        let idx = row.edge_id as usize;
        if idx >= g.edge_count() {
            return Err(Error::Mismatch(format!(
                "edge id {} not in a graph of {} records",
                row.edge_id,
                g.edge_count()
            )));
        }
        let e = g.edge(row.edge_id);
        if (g.label(e.src), g.label(e.dst), e.t) != (row.src, row.dst, row.timestamp) {
            return Err(Error::Mismatch(format!(
                "edge {} is ({} -> {} @ {}) in the graph but ({} -> {} @ {}) in the assignment",
                row.edge_id,
                g.label(e.src),
                g.label(e.dst),
                e.t,
                row.src,
                row.dst,
                row.timestamp
            )));
        }
        if row.cluster_id < NOISE {
            return Err(Error::UnknownCluster(row.cluster_id));
        }
        labels[idx] = Some(row.cluster_id);
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::Mismatch(format!("edge {i} missing from assignment"))))
        .collect::<Result<Vec<i64>>>()?;
    let cluster_count = labels.iter().copied().max().map_or(0, |m| (m + 1).max(0) as usize);
    Ok(ClusterAssignment { labels, cluster_count })
}
