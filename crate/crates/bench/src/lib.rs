//! Shared fixtures for the criterion benchmarks.

use edgeclust::generate::{scale_free, ScaleFreeConfig};
use edgeclust::DynamicMultigraph;

/// Seeded scale-free graph with `edges` records.
pub fn scale_free_graph(edges: usize) -> DynamicMultigraph {
    DynamicMultigraph::from_triples(scale_free(&ScaleFreeConfig {
        edges,
        max_vertices: (edges / 10).max(16),
        ..Default::default()
    }))
}
