//! Brute-force checks of the skeleton against the explicit line graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dendrogram::{partition_of_edges, LevelPartition};
use crate::error::Result;
use crate::skeleton::{
    build_skeleton_from_incidence, edge_bound, kruskal_mst, node_local_kruskal, node_local_line_graph,
    oracle_pair_count, LineGraphSkeleton, SkeletonEdge, Weight,
};
use crate::temporal_graph::{build_incidence, DynamicMultigraph, EdgeId, VertexId};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Summary on success, a minimal witness on failure.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub const BOUND: &str = "skeleton edge bound";
pub const MST_CONNECTIVITY: &str = "line graph MST connectivity";
pub const LOCAL_KRUSKAL: &str = "node-local Kruskal equivalence";
pub const GLOBAL_CONNECTIVITY: &str = "weight-filtered component equivalence";

/// Builds the skeleton of `g` and checks it.
pub fn verify_graph(g: &DynamicMultigraph, cap: u64) -> Result<VerifyReport> {
    let incidence = build_incidence(g);
    let skeleton = build_skeleton_from_incidence(g, &incidence);
    verify_skeleton(g, &skeleton, cap)
}

/// Checks a given skeleton against the oracle line graph of `g`.
pub fn verify_skeleton(g: &DynamicMultigraph, skeleton: &LineGraphSkeleton, cap: u64) -> Result<VerifyReport> {
    let incidence = build_incidence(g);
    let pairs = oracle_pair_count(&incidence);
    if pairs > cap {
        return Err(Error::OracleCapExceeded { pairs, cap });
    }
    let n = g.edge_count();
    let oracle: Vec<SkeletonEdge> = incidence.iter().flat_map(node_local_line_graph).collect();
    let mut checks = Vec::new();

    let bound = edge_bound(n, g.vertex_count());
    checks.push(Check {
        name: BOUND,
        passed: skeleton.edges.len() <= bound,
        detail: format!("{} skeleton edges, bound {bound}", skeleton.edges.len()),
    });

    let nodes: Vec<EdgeId> = (0..n as EdgeId).collect();
    let mst = kruskal_mst(&nodes, &oracle);
    checks.push(component_check(
        MST_CONNECTIVITY,
        n,
        &oracle,
        &mst,
        "full line graph",
        "its MST",
    ));

    let mut by_center: BTreeMap<VertexId, BTreeSet<(EdgeId, EdgeId, Weight)>> = BTreeMap::new();
    for e in &skeleton.edges {
        by_center.entry(e.center).or_default().insert((e.u, e.v, e.w));
    }
    let mut witness = None;
    for inc in &incidence {
        let want: BTreeSet<_> = node_local_kruskal(inc).iter().map(|e| (e.u, e.v, e.w)).collect();
        let got = by_center.remove(&inc.vertex).unwrap_or_default();
        if want != got {
            let missing = want.difference(&got).next().copied();
            let extra = got.difference(&want).next().copied();
            witness = Some(format!(
                "vertex {}: Kruskal edge {:?} absent from skeleton, skeleton edge {:?} not in Kruskal tree",
                g.label(inc.vertex),
                missing,
                extra
            ));
            break;
        }
    }
    if witness.is_none() {
        if let Some((&v, _)) = by_center.iter().next() {
            witness = Some(format!("skeleton has edges centered on unknown vertex {v}"));
        }
    }
    checks.push(match witness {
        None => Check {
            name: LOCAL_KRUSKAL,
            passed: true,
            detail: format!("{} vertices agree", incidence.len()),
        },
        Some(w) => Check {
            name: LOCAL_KRUSKAL,
            passed: false,
            detail: w,
        },
    });

    checks.push(component_check(
        GLOBAL_CONNECTIVITY,
        n,
        &oracle,
        &skeleton.edges,
        "full line graph",
        "skeleton",
    ));
    Ok(VerifyReport { checks })
}

/// Compares weight-filtered components of two edge sets at every weight
/// occurring in either.
fn component_check(
    name: &'static str,
    n: usize,
    a: &[SkeletonEdge],
    b: &[SkeletonEdge],
    a_name: &str,
    b_name: &str,
) -> Check {
    let omegas: BTreeSet<Weight> = a.iter().chain(b).map(|e| e.w).collect();
    for &omega in &omegas {
        let pa = partition_of_edges(n, a, omega);
        let pb = partition_of_edges(n, b, omega);
        if let Some((x, y)) = split_witness(&pa, &pb) {
            let (joined, apart) = if pa.component[x] == pa.component[y] {
                (a_name, b_name)
            } else {
                (b_name, a_name)
            };
            return Check {
                name,
                passed: false,
                detail: format!(
                    "omega={omega}: records {x} and {y} are connected in the {joined} but not in the {apart}"
                ),
            };
        }
    }
    Check {
        name,
        passed: true,
        detail: format!("{} thresholds agree", omegas.len()),
    }
}

/// A pair of nodes grouped together by one partition and apart in the other.
pub fn split_witness(a: &LevelPartition, b: &LevelPartition) -> Option<(usize, usize)> {
    for (i, (&ca, &cb)) in a.component.iter().zip(&b.component).enumerate() {
        if ca != cb {
            // canonical ids are minimum members, so i is grouped with ca in a and cb in b
            let other = ca.min(cb) as usize;
            return Some((other, i));
        }
    }
    None
}
