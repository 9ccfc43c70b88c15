//! Merge hierarchies over skeleton nodes.
//!
//! Leaves are skeleton nodes (ids `0..leaf_count`); merge nodes follow with
//! ids `leaf_count..`. A merge node records the weight threshold at which its
//! component formed. Children always have smaller ids than their parent and
//! thresholds never decrease going up.
//!
//! Zero-weight edges join records with tied timestamps. Both builders merge
//! them first, at threshold 0, so the clustering stage can treat every
//! threshold-0 component as one atomic unit.

use std::collections::HashMap;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::skeleton::{LineGraphSkeleton, SkeletonEdge, Weight};
use crate::union_find::UnionFind;

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeNode {
    pub id: NodeId,
    pub omega: Weight,
    /// Ordered by smallest member.
    pub children: Vec<NodeId>,
    pub size: u32,
    pub min_member: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DendrogramKind {
    /// One binary merge per skeleton edge that joins two components.
    Exact,
    /// One layer per threshold; `levels[i]` lists nodes formed at that layer.
    Discrete { levels: Vec<(Weight, Vec<NodeId>)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dendrogram {
    pub leaf_count: usize,
    pub nodes: Vec<MergeNode>,
    /// Maximal components, ordered by smallest member.
    pub roots: Vec<NodeId>,
    pub kind: DendrogramKind,
}

/// Connected components of the skeleton restricted to edges with `w <= omega`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelPartition {
    pub omega: Weight,
    /// Component of each node, named by its smallest member.
    pub component: Vec<u32>,
}

impl LevelPartition {
    pub fn component_count(&self) -> usize {
        self.component
            .iter()
            .enumerate()
            .filter(|&(i, &c)| i as u32 == c)
            .count()
    }

    /// True when every component of `self` lies inside one component of `coarser`.
    pub fn refines(&self, coarser: &LevelPartition) -> bool {
        if self.component.len() != coarser.component.len() {
            return false;
        }
        let mut image: HashMap<u32, u32> = HashMap::new();
        self.component
            .iter()
            .zip(&coarser.component)
            .all(|(&fine, &coarse)| *image.entry(fine).or_insert(coarse) == coarse)
    }
}

pub fn weight_filtered_components(s: &LineGraphSkeleton, omega: Weight) -> LevelPartition {
    partition_of_edges(s.node_count, &s.edges, omega)
}

/// Weight-filtered components of an arbitrary edge list over `node_count` nodes.
pub fn partition_of_edges(node_count: usize, edges: &[SkeletonEdge], omega: Weight) -> LevelPartition {
    let mut uf = UnionFind::new(node_count);
    for e in edges.iter().filter(|e| e.w <= omega) {
        uf.union(e.u, e.v);
    }
    LevelPartition {
        omega,
        component: uf.canonical_labels(),
    }
}

fn sorted_edges(s: &LineGraphSkeleton) -> Vec<SkeletonEdge> {
    let mut edges = s.edges.clone();
    edges.par_sort_unstable_by_key(SkeletonEdge::sort_key);
    edges
}

struct Builder {
    leaf_count: usize,
    nodes: Vec<MergeNode>,
}

impl Builder {
    fn new(leaf_count: usize) -> Self {
        Builder {
            leaf_count,
            nodes: Vec::new(),
        }
    }

    fn size(&self, id: NodeId) -> u32 {
        if (id as usize) < self.leaf_count {
            1
        } else {
            self.nodes[id as usize - self.leaf_count].size
        }
    }

    fn min_member(&self, id: NodeId) -> u32 {
        if (id as usize) < self.leaf_count {
            id
        } else {
            self.nodes[id as usize - self.leaf_count].min_member
        }
    }

    fn push(&mut self, omega: Weight, mut children: Vec<NodeId>) -> NodeId {
        children.sort_unstable_by_key(|&c| self.min_member(c));
        let id = (self.leaf_count + self.nodes.len()) as NodeId;
        let size = children.iter().map(|&c| self.size(c)).sum();
        let min_member = self.min_member(children[0]);
        self.nodes.push(MergeNode {
            id,
            omega,
            children,
            size,
            min_member,
        });
        id
    }

    fn finish(self, uf: &mut UnionFind, node_of_root: &[NodeId], kind: DendrogramKind) -> Dendrogram {
        let mut roots: Vec<NodeId> = (0..self.leaf_count as u32)
            .filter(|&x| uf.find(x) == x)
            .map(|r| node_of_root[r as usize])
            .collect();
        roots.sort_unstable_by_key(|&r| self.min_member(r));
        Dendrogram {
            leaf_count: self.leaf_count,
            nodes: self.nodes,
            roots,
            kind,
        }
    }
}

/// Single-linkage hierarchy: edges in ascending `(w, u, v)` order, one merge
/// node per union of two distinct components. Edges inside an existing
/// component are skipped, which realizes Kruskal's algorithm implicitly.
pub fn exact_dendrogram(s: &LineGraphSkeleton) -> Dendrogram {
    let n = s.node_count;
    let mut uf = UnionFind::new(n);
    let mut node_of_root: Vec<NodeId> = (0..n as NodeId).collect();
    let mut b = Builder::new(n);
    for e in sorted_edges(s) {
        let (ra, rb) = (uf.find(e.u), uf.find(e.v));
        if ra == rb {
            continue;
        }
        let children = vec![node_of_root[ra as usize], node_of_root[rb as usize]];
        let id = b.push(e.w, children);
        let r = uf.union(ra, rb).expect("distinct roots");
        node_of_root[r as usize] = id;
    }
    b.finish(&mut uf, &node_of_root, DendrogramKind::Exact)
}

/// Leveled hierarchy from connected components at each threshold, computed
/// by adding edges in batches. Threshold 0 is always the first layer. A
/// component that does not change between layers is not repeated.
pub fn discrete_dendrogram(s: &LineGraphSkeleton, thresholds: &[Weight]) -> Result<Dendrogram> {
    if thresholds.is_empty() {
        return Err(Error::InvalidThresholds("threshold list is empty".into()));
    }
    if let Some(w) = thresholds.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidThresholds(format!(
            "thresholds must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    let mut ladder = Vec::with_capacity(thresholds.len() + 1);
    if thresholds[0] != 0 {
        ladder.push(0);
    }
    ladder.extend_from_slice(thresholds);

    let n = s.node_count;
    let edges = sorted_edges(s);
    let mut uf = UnionFind::new(n);
    let mut node_of_root: Vec<NodeId> = (0..n as NodeId).collect();
    let mut b = Builder::new(n);
    let mut levels = Vec::with_capacity(ladder.len());
    let mut next = 0;
    for &omega in &ladder {
        let mut pending: HashMap<u32, Vec<NodeId>> = HashMap::new();
        while next < edges.len() && edges[next].w <= omega {
            let e = &edges[next];
            next += 1;
            let (ra, rb) = (uf.find(e.u), uf.find(e.v));
            if ra == rb {
                continue;
            }
            let mut a = pending.remove(&ra).unwrap_or_else(|| vec![node_of_root[ra as usize]]);
            let mut c = pending.remove(&rb).unwrap_or_else(|| vec![node_of_root[rb as usize]]);
            if a.len() < c.len() {
                std::mem::swap(&mut a, &mut c);
            }
            a.extend(c);
            let r = uf.union(ra, rb).expect("distinct roots");
            pending.insert(r, a);
        }
        let mut formed: Vec<(u32, Vec<NodeId>)> = pending.into_iter().collect();
        for (_, children) in formed.iter_mut() {
            children.sort_unstable_by_key(|&c| b.min_member(c));
        }
        formed.sort_unstable_by_key(|(_, children)| b.min_member(children[0]));
        let mut ids = Vec::with_capacity(formed.len());
        for (root, children) in formed {
            let id = b.push(omega, children);
            node_of_root[root as usize] = id;
            ids.push(id);
        }
        levels.push((omega, ids));
    }
    Ok(b.finish(&mut uf, &node_of_root, DendrogramKind::Discrete { levels }))
}

/// Powers of two from 1 s to 2^28 s.
pub fn default_ladder() -> Vec<Weight> {
    (0..=28).map(|k| 1u64 << k).collect()
}

/// How to choose the discrete dendrogram thresholds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ThresholdSpec {
    /// `1, base, base^2, ...` up to and including `max`.
    Geometric {
        base: u64,
        max: u64,
    },
    List(Vec<Weight>),
    /// `n` evenly spaced quantiles of the positive skeleton weights.
    Quantiles(usize),
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        ThresholdSpec::Geometric { base: 2, max: 1 << 28 }
    }
}

impl FromStr for ThresholdSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("bad threshold spec `{s}`"))?;
        let num = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| format!("`{t}` is not a non-negative integer"))
        };
        match kind {
            "geometric" => {
                let (base, max) = rest
                    .split_once(':')
                    .ok_or_else(|| "expected geometric:<base>:<max>".to_string())?;
                let (base, max) = (num(base)?, num(max)?);
                if base < 2 {
                    return Err("geometric base must be at least 2".into());
                }
                Ok(ThresholdSpec::Geometric { base, max })
            }
            "list" => rest
                .split(',')
                .map(num)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(ThresholdSpec::List),
            "quantiles" => {
                let n = num(rest)? as usize;
                if n == 0 {
                    return Err("quantile count must be positive".into());
                }
                Ok(ThresholdSpec::Quantiles(n))
            }
            other => Err(format!("unknown threshold kind `{other}`")),
        }
    }
}

impl std::fmt::Display for ThresholdSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdSpec::Geometric { base, max } => write!(f, "geometric:{base}:{max}"),
            ThresholdSpec::List(ws) => {
                let parts: Vec<String> = ws.iter().map(u64::to_string).collect();
                write!(f, "list:{}", parts.join(","))
            }
            ThresholdSpec::Quantiles(n) => write!(f, "quantiles:{n}"),
        }
    }
}

impl ThresholdSpec {
    /// Concrete strictly increasing thresholds for a skeleton.
    pub fn resolve(&self, s: &LineGraphSkeleton) -> Vec<Weight> {
        let mut out = match self {
            ThresholdSpec::Geometric { base, max } => {
                let mut v = Vec::new();
                let mut x = 1u64;
                while x <= *max {
                    v.push(x);
                    match x.checked_mul(*base) {
                        Some(y) => x = y,
                        None => break,
                    }
                }
                v
            }
            ThresholdSpec::List(ws) => ws.clone(),
            ThresholdSpec::Quantiles(n) => {
                let mut w: Vec<Weight> = s.edges.iter().map(|e| e.w).filter(|&w| w > 0).collect();
                w.sort_unstable();
                if w.is_empty() {
                    Vec::new()
                } else {
                    (1..=*n)
                        .map(|k| w[((k * w.len()).div_ceil(*n)).saturating_sub(1)])
                        .collect()
                }
            }
        };
        out.sort_unstable();
        out.dedup();
        if out.is_empty() {
            out.push(0);
        }
        out
    }
}

impl Dendrogram {
    pub fn is_leaf(&self, id: NodeId) -> bool {
        (id as usize) < self.leaf_count
    }

    pub fn node(&self, id: NodeId) -> Option<&MergeNode> {
        (id as usize)
            .checked_sub(self.leaf_count)
            .and_then(|i| self.nodes.get(i))
    }

    pub fn size(&self, id: NodeId) -> u32 {
        self.node(id).map_or(1, |n| n.size)
    }

    pub fn min_member(&self, id: NodeId) -> u32 {
        self.node(id).map_or(id, |n| n.min_member)
    }

    /// Threshold at which `id` formed; leaves exist from the start.
    pub fn omega(&self, id: NodeId) -> Weight {
        self.node(id).map_or(0, |n| n.omega)
    }

    /// Children with chains of equal-threshold merges expanded, so that a run
    /// of binary merges at one weight reads as a single multi-way merge.
    pub fn flattened_children(&self, id: NodeId) -> Vec<NodeId> {
        let Some(node) = self.node(id) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut stack: Vec<NodeId> = node.children.iter().rev().copied().collect();
        while let Some(c) = stack.pop() {
            match self.node(c) {
                Some(cn) if cn.omega == node.omega => {
                    stack.extend(cn.children.iter().rev().copied());
                }
                _ => out.push(c),
            }
        }
        out.sort_unstable_by_key(|&c| self.min_member(c));
        out
    }

    /// Leaf ids under `id`.
    pub fn members(&self, id: NodeId) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            match self.node(x) {
                Some(n) => stack.extend(n.children.iter().copied()),
                None => out.push(x),
            }
        }
        out
    }

    /// Parent of every node id (leaves and merges); `None` for roots.
    pub fn parents(&self) -> Vec<Option<NodeId>> {
        let mut parent = vec![None; self.leaf_count + self.nodes.len()];
        for n in &self.nodes {
            for &c in &n.children {
                parent[c as usize] = Some(n.id);
            }
        }
        parent
    }

    /// The partition the hierarchy induces at threshold `omega`.
    pub fn partition_at(&self, omega: Weight) -> LevelPartition {
        let parent = self.parents();
        let total = parent.len();
        let mut rep: Vec<Option<NodeId>> = vec![None; total];
        for id in (0..total as NodeId).rev() {
            if self.omega(id) > omega {
                continue;
            }
            rep[id as usize] = match parent[id as usize].and_then(|p| rep[p as usize]) {
                Some(r) => Some(r),
                None => Some(id),
            };
        }
        let component = (0..self.leaf_count)
            .map(|leaf| self.min_member(rep[leaf].expect("leaves have threshold 0")))
            .collect();
        LevelPartition { omega, component }
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Merge {
            omega: Weight,
            left: NodeId,
            right: NodeId,
            size: u32,
        }
        #[derive(Serialize)]
        struct Component<'a> {
            id: NodeId,
            members_count: u32,
            children: &'a [NodeId],
        }
        #[derive(Serialize)]
        struct Level<'a> {
            omega: Weight,
            components: Vec<Component<'a>>,
        }
        match &self.kind {
            DendrogramKind::Exact => {
                let merges: Vec<Merge> = self
                    .nodes
                    .iter()
                    .map(|n| Merge {
                        omega: n.omega,
                        left: n.children[0],
                        right: n.children[1],
                        size: n.size,
                    })
                    .collect();
                serde_json::to_writer(
                    w,
                    &serde_json::json!({ "leaf_count": self.leaf_count, "merges": merges }),
                )?;
            }
            DendrogramKind::Discrete { levels } => {
                let levels: Vec<Level> = levels
                    .iter()
                    .map(|(omega, ids)| Level {
                        omega: *omega,
                        components: ids
                            .iter()
                            .map(|&id| {
                                let n = self.node(id).expect("merge node");
                                Component {
                                    id,
                                    members_count: n.size,
                                    children: &n.children,
                                }
                            })
                            .collect(),
                    })
                    .collect();
                serde_json::to_writer(
                    w,
                    &serde_json::json!({ "leaf_count": self.leaf_count, "levels": levels }),
                )?;
            }
        }
        Ok(())
    }
}
