//! Shared fixtures for unit tests.

use crate::graph::SignedGraph;
use crate::partition::Partition;

/// Two positive 3-cliques with all nine cross pairs negative: a complete
/// signed K6 that is perfectly balanced under the planted 2-block partition.
pub fn g2x3() -> SignedGraph {
    let mut edges = Vec::new();
    for base in [0u32, 3] {
        edges.push((base, base + 1, 1i8));
        edges.push((base, base + 2, 1));
        edges.push((base + 1, base + 2, 1));
    }
    for u in 0..3u32 {
        for v in 3..6u32 {
            edges.push((u, v, -1));
        }
    }
    SignedGraph::new(6, edges).expect("fixture is valid")
}

/// The planted partition of [`g2x3`].
pub fn g2x3_partition() -> Partition {
    Partition::from_labels(&[0, 0, 0, 1, 1, 1])
}
