//! Line graph skeleton: the union over vertices of node-local minimum
//! spanning trees of the increment-weighted line graph.
//!
//! A line graph edge joins record `u` to record `v` when `dst(u) == src(v)`
//! and `t(u) <= t(v)`, weighted by `t(v) - t(u)`. The full line graph is
//! quadratic in vertex degree; the skeleton keeps at most `2|E| - |V|` edges
//! and has the same weight-filtered connected components.
//!
//! [`full_line_graph_oracle`] and [`kruskal_mst`] build the explicit objects
//! and exist for verification only.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::temporal_graph::{build_incidence, Direction, DynamicMultigraph, EdgeId, IncidenceList, VertexId};
use crate::union_find::UnionFind;

/// Time increment in seconds.
pub type Weight = u64;

/// Default cap on the number of in/out pairs the oracle may enumerate.
pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

/// A tip-to-tail junction: in-edge `u` feeds out-edge `v` at vertex `center`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SkeletonEdge {
    pub u: EdgeId,
    pub v: EdgeId,
    pub w: Weight,
    pub center: VertexId,
}

impl SkeletonEdge {
    /// Global tie-break order used wherever edges are sorted by weight.
    pub fn sort_key(&self) -> (Weight, EdgeId, EdgeId) {
        (self.w, self.u, self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LineGraphSkeleton {
    /// Number of line graph nodes, one per input record.
    pub node_count: usize,
    pub edges: Vec<SkeletonEdge>,
}

/// `2|E| - |V|`, the maximum skeleton size for a graph without isolated vertices.
pub fn edge_bound(edge_count: usize, vertex_count: usize) -> usize {
    (2 * edge_count).saturating_sub(vertex_count)
}

/// Node-local MST of one vertex's line graph.
///
/// Scans the incidence in canonical order keeping a window of in-edges. An
/// out-edge connects to every in-edge in the window and then the window is
/// cut back to its last element. An out-edge seen with an empty window emits
/// nothing.
pub fn node_local_mst(inc: &IncidenceList) -> Vec<SkeletonEdge> {
    let mut out = Vec::new();
    let mut window: Vec<(EdgeId, u64)> = Vec::new();
    for entry in &inc.entries {
        match entry.dir {
            Direction::In => window.push((entry.edge, entry.t)),
            Direction::Out => {
                let Some(&last) = window.last() else {
                    continue;
                };
                out.extend(window.iter().map(|&(u, tu)| SkeletonEdge {
                    u,
                    v: entry.edge,
                    w: entry.t - tu,
                    center: inc.vertex,
                }));
                window.clear();
                window.push(last);
            }
        }
    }
    out
}

/// Skeleton from precomputed incidence lists. Per-vertex outputs are
/// concatenated in vertex order so the result does not depend on the pool size.
pub fn build_skeleton_from_incidence(g: &DynamicMultigraph, incidence: &[IncidenceList]) -> LineGraphSkeleton {
    let parts: Vec<Vec<SkeletonEdge>> = incidence.par_iter().map(node_local_mst).collect();
    let mut edges = Vec::with_capacity(parts.iter().map(Vec::len).sum());
    for p in parts {
        edges.extend(p);
    }
    let s = LineGraphSkeleton {
        node_count: g.edge_count(),
        edges,
    };
    assert!(
        s.edges.len() <= edge_bound(g.edge_count(), g.vertex_count()),
        "skeleton has {} edges, above the 2|E|-|V| bound",
        s.edges.len()
    );
    s
}

pub fn build_skeleton(g: &DynamicMultigraph) -> LineGraphSkeleton {
    build_skeleton_from_incidence(g, &build_incidence(g))
}

/// Every causal tip-to-tail pair at one vertex.
pub fn node_local_line_graph(inc: &IncidenceList) -> Vec<SkeletonEdge> {
    let ins = inc.entries.iter().filter(|e| e.dir == Direction::In);
    let mut out = Vec::new();
    for i in ins {
        for o in inc.entries.iter().filter(|e| e.dir == Direction::Out) {
            if i.t <= o.t {
                out.push(SkeletonEdge {
                    u: i.edge,
                    v: o.edge,
                    w: o.t - i.t,
                    center: inc.vertex,
                });
            }
        }
    }
    out
}

/// Upper bound on the oracle's output size: `sum_i din_i * dout_i`.
pub fn oracle_pair_count(incidence: &[IncidenceList]) -> u64 {
    incidence
        .iter()
        .map(|l| l.in_degree() as u64 * l.out_degree() as u64)
        .sum()
}

/// The full increment-weighted line graph, enumerated pair by pair.
/// Refuses instances whose pair count exceeds `cap`.
pub fn full_line_graph_oracle(g: &DynamicMultigraph, cap: u64) -> Result<Vec<SkeletonEdge>> {
    let incidence = build_incidence(g);
    let pairs = oracle_pair_count(&incidence);
    if pairs > cap {
        return Err(Error::OracleCapExceeded { pairs, cap });
    }
    Ok(incidence.iter().flat_map(node_local_line_graph).collect())
}

/// Kruskal's algorithm over an explicit node set, taking edges in ascending
/// `key` order. Returns a minimum spanning forest.
pub fn kruskal_mst_by<K, F>(nodes: &[EdgeId], edges: &[SkeletonEdge], key: F) -> Vec<SkeletonEdge>
where
    K: Ord,
    F: Fn(&SkeletonEdge) -> K,
{
    let index: HashMap<EdgeId, u32> = nodes.iter().enumerate().map(|(i, &n)| (n, i as u32)).collect();
    let mut sorted: Vec<&SkeletonEdge> = edges.iter().collect();
    sorted.sort_by_key(|e| key(e));
    let mut uf = UnionFind::new(nodes.len());
    sorted
        .into_iter()
        .filter(|e| uf.union(index[&e.u], index[&e.v]).is_some())
        .copied()
        .collect()
}

/// Kruskal with the global `(w, u, v)` tie-break.
pub fn kruskal_mst(nodes: &[EdgeId], edges: &[SkeletonEdge]) -> Vec<SkeletonEdge> {
    kruskal_mst_by(nodes, edges, SkeletonEdge::sort_key)
}

/// Tie-break that makes node-local line graph weights unique the same way an
/// infinitesimal perturbation `t_in + g^2 p`, `t_out + g q` would, where `p`
/// and `q` are positions among the vertex's in- and out-edges. Among equal
/// weights this prefers the earlier out-edge, then the later in-edge.
pub struct PerturbedOrder {
    in_rank: HashMap<EdgeId, usize>,
    out_rank: HashMap<EdgeId, usize>,
}

impl PerturbedOrder {
    pub fn for_incidence(inc: &IncidenceList) -> Self {
        let rank = |dir| {
            inc.entries
                .iter()
                .filter(|e| e.dir == dir)
                .enumerate()
                .map(|(r, e)| (e.edge, r))
                .collect::<HashMap<_, _>>()
        };
        PerturbedOrder {
            in_rank: rank(Direction::In),
            out_rank: rank(Direction::Out),
        }
    }

    pub fn key(&self, e: &SkeletonEdge) -> (Weight, usize, Reverse<usize>) {
        (e.w, self.out_rank[&e.v], Reverse(self.in_rank[&e.u]))
    }
}

/// Kruskal on the explicit node-local line graph of `inc` under the
/// perturbation tie-break.
pub fn node_local_kruskal(inc: &IncidenceList) -> Vec<SkeletonEdge> {
    let order = PerturbedOrder::for_incidence(inc);
    let nodes: Vec<EdgeId> = inc.entries.iter().map(|e| e.edge).collect();
    kruskal_mst_by(&nodes, &node_local_line_graph(inc), |e| order.key(e))
}

/// Keeps only edges with weight at most `max_weight`.
pub fn apply_cutoff(s: &LineGraphSkeleton, max_weight: Weight) -> LineGraphSkeleton {
    LineGraphSkeleton {
        node_count: s.node_count,
        edges: s.edges.iter().filter(|e| e.w <= max_weight).copied().collect(),
    }
}

impl LineGraphSkeleton {
    pub fn bound_holds(&self, vertex_count: usize) -> bool {
        self.edges.len() <= edge_bound(self.node_count, vertex_count)
    }

    /// Sorted distinct edge weights.
    pub fn distinct_weights(&self) -> Vec<Weight> {
        let mut w: Vec<Weight> = self.edges.iter().map(|e| e.w).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    /// CSV rows `u,v,w,center` with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for e in &self.edges {
            wtr.serialize(e)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, node_count: usize) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut edges = Vec::new();
        for row in rdr.deserialize() {
            let e: SkeletonEdge = row?;
            check_endpoints(&e, node_count)?;
            edges.push(e);
        }
        Ok(LineGraphSkeleton { node_count, edges })
    }

    /// Little-endian binary: magic, node count, edge count, then
    /// `u32 u, u32 v, u64 w, u32 center` per edge.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&(self.node_count as u64).to_le_bytes())?;
        w.write_all(&(self.edges.len() as u64).to_le_bytes())?;
        for e in &self.edges {
            w.write_all(&e.u.to_le_bytes())?;
            w.write_all(&e.v.to_le_bytes())?;
            w.write_all(&e.w.to_le_bytes())?;
            w.write_all(&e.center.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Parse {
                line: 0,
                msg: "not a binary skeleton file".into(),
            });
        }
        let node_count = read_u64(&mut r)? as usize;
        let n = read_u64(&mut r)? as usize;
        let mut edges = Vec::with_capacity(n);
        let mut rec = [0u8; 20];
        for _ in 0..n {
            r.read_exact(&mut rec)?;
            let e = SkeletonEdge {
                u: u32::from_le_bytes(rec[0..4].try_into().unwrap()),
                v: u32::from_le_bytes(rec[4..8].try_into().unwrap()),
                w: u64::from_le_bytes(rec[8..16].try_into().unwrap()),
                center: u32::from_le_bytes(rec[16..20].try_into().unwrap()),
            };
            check_endpoints(&e, node_count)?;
            edges.push(e);
        }
        Ok(LineGraphSkeleton { node_count, edges })
    }
}

const BINARY_MAGIC: &[u8; 8] = b"LGSKEL01";

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn check_endpoints(e: &SkeletonEdge, node_count: usize) -> Result<()> {
    if e.u as usize >= node_count || e.v as usize >= node_count {
        return Err(Error::Mismatch(format!(
            "skeleton edge ({}, {}) references a record outside 0..{node_count}",
            e.u, e.v
        )));
    }
    Ok(())
}
