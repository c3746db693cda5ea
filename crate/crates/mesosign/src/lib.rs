#![doc = include_str!("../../../book/src/overview.md")]

pub mod error;

#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graph;

#[doc = include_str!("../../../book/src/partitioning.md")]
pub mod partition;

#[doc = include_str!("../../../book/src/blockmodel.md")]
pub mod blockmodel;

#[doc = include_str!("../../../book/src/classification.md")]
pub mod classify;

#[doc = include_str!("../../../book/src/balance.md")]
pub mod balance;

#[doc = include_str!("../../../book/src/synthetic.md")]
pub mod synth;

pub mod report;
pub mod rng;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use graph::{
    descriptive_stats, largest_connected_component, load_edge_list, load_undirected_edge_list,
    symmetrize, DirectedSignedGraph, EdgeListFormat, GraphStats, SignedGraph,
};
pub use partition::{
    import_partition, louvain_signed, signed_modularity, spectral_signed, ModularityScore,
    Partition,
};
