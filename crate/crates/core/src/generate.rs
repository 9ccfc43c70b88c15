//! Seeded synthetic dynamic multigraphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::temporal_graph::DynamicMultigraph;

/// Preferential-attachment multigraph with exponential inter-arrival times.
///
/// Endpoints are drawn proportionally to current degree, with a fixed
/// probability of introducing a new vertex instead. With probability
/// `reply_prob` a record is sent onward by the previous record's receiver,
/// which produces tip-to-tail cascades.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleFreeConfig {
    pub edges: usize,
    pub max_vertices: usize,
    pub new_vertex_prob: f64,
    pub reply_prob: f64,
    /// Mean seconds between consecutive records.
    pub mean_gap: f64,
    pub seed: u64,
}

impl Default for ScaleFreeConfig {
    fn default() -> Self {
        ScaleFreeConfig {
            edges: 1_000_000,
            max_vertices: 100_000,
            new_vertex_prob: 0.05,
            reply_prob: 0.3,
            mean_gap: 2.0,
            seed: 42,
        }
    }
}

fn pick(rng: &mut ChaCha8Rng, endpoints: &[u64], vertices: &mut u64, max_v: u64, p_new: f64) -> u64 {
    if *vertices < max_v && rng.gen_bool(p_new) {
        *vertices += 1;
        *vertices - 1
    } else {
        endpoints[rng.gen_range(0..endpoints.len())]
    }
}

pub fn scale_free(cfg: &ScaleFreeConfig) -> Vec<(u64, u64, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gap = Exp::new(1.0 / cfg.mean_gap.max(f64::MIN_POSITIVE)).expect("positive rate");
    let max_v = cfg.max_vertices.max(2) as u64;
    let mut endpoints: Vec<u64> = vec![0, 1];
    let mut vertices = 2u64;
    let mut t = 0f64;
    let mut last_dst: Option<u64> = None;
    let mut out = Vec::with_capacity(cfg.edges);

    while out.len() < cfg.edges {
        t += gap.sample(&mut rng);
        let src = match last_dst {
            Some(d) if rng.gen_bool(cfg.reply_prob) => d,
            _ => pick(&mut rng, &endpoints, &mut vertices, max_v, cfg.new_vertex_prob),
        };
        let mut dst = pick(&mut rng, &endpoints, &mut vertices, max_v, cfg.new_vertex_prob);
        let mut tries = 0;
        while dst == src {
            tries += 1;
            dst = if tries < 8 {
                pick(&mut rng, &endpoints, &mut vertices, max_v, cfg.new_vertex_prob)
            } else {
                (src + 1) % vertices
            };
        }
        endpoints.push(src);
        endpoints.push(dst);
        last_dst = Some(dst);
        out.push((src, dst, t as u64));
    }
    out
}

/// Uniformly random records over a small vertex set and a short time range,
/// so timestamp ties and reciprocal pairs are common.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformConfig {
    pub vertices: u64,
    pub edges: usize,
    pub time_range: u64,
    pub seed: u64,
}

pub fn uniform(cfg: &UniformConfig) -> DynamicMultigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.vertices.max(2);
    let triples: Vec<(u64, u64, u64)> = (0..cfg.edges)
        .map(|_| {
            let s = rng.gen_range(0..n);
            let d = (s + rng.gen_range(1..n)) % n;
            (s, d, rng.gen_range(0..cfg.time_range.max(1)))
        })
        .collect();
    DynamicMultigraph::from_triples(triples)
}
