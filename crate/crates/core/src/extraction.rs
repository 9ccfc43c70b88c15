//! Condensing a merge hierarchy under a minimum cluster size and extracting
//! flat clusters by excess of mass.
//!
//! Densities are `lambda = 1 / omega`. Each maximal component is condensed
//! on its own with birth lambda 0. Threshold-0 components (records tied in
//! time) are never split: their members leave together, like a single point
//! with multiplicity.

use std::io::Write;

use serde::Serialize;

use crate::dendrogram::{Dendrogram, NodeId};
use crate::error::{Error, Result};

pub type ClusterId = u32;

/// Label used for records outside every selected cluster.
pub const NOISE: i64 = -1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondensedCluster {
    pub id: ClusterId,
    pub parent: Option<ClusterId>,
    pub birth_lambda: f64,
    pub death_lambda: f64,
    pub size: u32,
    pub stability: f64,
    pub selected: bool,
    #[serde(skip)]
    pub children: Vec<ClusterId>,
}

/// A dendrogram subtree whose members leave `cluster` at `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exit {
    pub node: NodeId,
    pub cluster: ClusterId,
    pub lambda: f64,
    pub size: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondensedTree {
    pub min_cluster_size: usize,
    pub clusters: Vec<CondensedCluster>,
    pub exits: Vec<Exit>,
    /// Maximal components smaller than the minimum cluster size.
    pub small_roots: Vec<NodeId>,
}

fn lambda_of(omega: u64) -> f64 {
    1.0 / omega as f64
}

fn is_atomic(d: &Dendrogram, id: NodeId) -> bool {
    d.is_leaf(id) || d.omega(id) == 0
}

fn push_cluster(clusters: &mut Vec<CondensedCluster>, parent: Option<ClusterId>, birth: f64, size: u32) -> ClusterId {
    let id = clusters.len() as ClusterId;
    clusters.push(CondensedCluster {
        id,
        parent,
        birth_lambda: birth,
        death_lambda: birth,
        size,
        stability: 0.0,
        selected: false,
        children: Vec::new(),
    });
    if let Some(p) = parent {
        clusters[p as usize].children.push(id);
    }
    id
}

/// Walks each component top-down. A merge whose parts include two or more
/// of size at least `min_cluster_size` ends the current cluster and starts one
/// per large part; smaller parts fall out at the merge's lambda.
pub fn condense(d: &Dendrogram, min_cluster_size: usize) -> Result<CondensedTree> {
    if min_cluster_size < 2 {
        return Err(Error::MinClusterSize(min_cluster_size));
    }
    let m = min_cluster_size as u32;
    let mut clusters: Vec<CondensedCluster> = Vec::new();
    let mut exits = Vec::new();
    let mut small_roots = Vec::new();

    let mut stack: Vec<(NodeId, ClusterId, f64)> = Vec::new();
    for &root in &d.roots {
        let size = d.size(root);
        if size < m {
            small_roots.push(root);
            continue;
        }
        let c = push_cluster(&mut clusters, None, 0.0, size);
        stack.push((root, c, 0.0));
        while let Some((node, c, arrival)) = stack.pop() {
            if is_atomic(d, node) {
                exits.push(Exit {
                    node,
                    cluster: c,
                    lambda: arrival,
                    size: d.size(node),
                });
                let cl = &mut clusters[c as usize];
                cl.death_lambda = cl.death_lambda.max(arrival);
                continue;
            }
            let lam = lambda_of(d.omega(node));
            let children = d.flattened_children(node);
            let large = children.iter().filter(|&&ch| d.size(ch) >= m).count();
            let cl = &mut clusters[c as usize];
            cl.death_lambda = cl.death_lambda.max(lam);
            let mut next = Vec::new();
            for ch in children {
                let size = d.size(ch);
                if size < m {
                    exits.push(Exit {
                        node: ch,
                        cluster: c,
                        lambda: lam,
                        size,
                    });
                } else if large >= 2 {
                    let nc = push_cluster(&mut clusters, Some(c), lam, size);
                    next.push((ch, nc, lam));
                } else {
                    next.push((ch, c, lam));
                }
            }
            stack.extend(next.into_iter().rev());
        }
    }
    Ok(CondensedTree {
        min_cluster_size,
        clusters,
        exits,
        small_roots,
    })
}

/// Fills `stability` for every cluster: the sum over its members of the
/// lambda at which they leave it minus its birth lambda.
pub fn compute_stability(tree: &mut CondensedTree) {
    let mut stab = vec![0.0f64; tree.clusters.len()];
    for e in &tree.exits {
        let birth = tree.clusters[e.cluster as usize].birth_lambda;
        stab[e.cluster as usize] += e.size as f64 * (e.lambda - birth);
    }
    for c in &tree.clusters {
        if let Some(p) = c.parent {
            let pb = tree.clusters[p as usize].birth_lambda;
            stab[p as usize] += c.size as f64 * (c.birth_lambda - pb);
        }
    }
    for (c, s) in tree.clusters.iter_mut().zip(stab) {
        c.stability = s;
    }
}

/// Flat clustering of skeleton nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    /// Per record: cluster label in `0..cluster_count`, or [`NOISE`].
    pub labels: Vec<i64>,
    pub cluster_count: usize,
}

impl ClusterAssignment {
    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == NOISE).count()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.cluster_count];
        for &l in &self.labels {
            if l >= 0 {
                sizes[l as usize] += 1;
            }
        }
        sizes
    }

    /// Member record ids of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.cluster_count];
        for (i, &l) in self.labels.iter().enumerate() {
            if l >= 0 {
                out[l as usize].push(i as u32);
            }
        }
        out
    }
}

/// Excess-of-mass selection, bottom-up. A cluster replaces its selected
/// descendants only when its stability is strictly larger than theirs
/// combined; leaf clusters start selected. Sets `selected` on the tree and
/// labels records, numbering clusters by their smallest member.
pub fn extract(d: &Dendrogram, tree: &mut CondensedTree) -> ClusterAssignment {
    let n = tree.clusters.len();
    let mut value = vec![0.0f64; n];
    let mut keep = vec![false; n];
    for c in (0..n).rev() {
        let cl = &tree.clusters[c];
        if cl.children.is_empty() {
            keep[c] = true;
            value[c] = cl.stability;
        } else {
            let below: f64 = cl.children.iter().map(|&k| value[k as usize]).sum();
            if cl.stability > below {
                keep[c] = true;
                value[c] = cl.stability;
            } else {
                value[c] = below;
            }
        }
    }
    // parents precede children in id order
    let mut owner: Vec<Option<ClusterId>> = vec![None; n];
    for c in 0..n {
        let inherited = tree.clusters[c].parent.and_then(|p| owner[p as usize]);
        owner[c] = inherited.or(keep[c].then_some(c as ClusterId));
        tree.clusters[c].selected = keep[c] && inherited.is_none();
    }

    let mut raw = vec![NOISE; d.leaf_count];
    for e in &tree.exits {
        if let Some(o) = owner[e.cluster as usize] {
            for leaf in d.members(e.node) {
                raw[leaf as usize] = o as i64;
            }
        }
    }
    let mut renumber = vec![NOISE; n];
    let mut next = 0i64;
    let labels = raw
        .into_iter()
        .map(|r| {
            if r == NOISE {
                return NOISE;
            }
            let slot = &mut renumber[r as usize];
            if *slot == NOISE {
                *slot = next;
                next += 1;
            }
            *slot
        })
        .collect();
    ClusterAssignment {
        labels,
        cluster_count: next as usize,
    }
}

impl CondensedTree {
    /// `{clusters: [{id, parent, birth_lambda, death_lambda, size, stability, selected}]}`
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer(w, &serde_json::json!({ "clusters": self.clusters }))?;
        Ok(())
    }
}
