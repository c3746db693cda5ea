use std::collections::BTreeMap;

use serde::Serialize;

use crate::classify::{Category, PairRelation};
use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::partition::Partition;

/// Meso-scale frustration summary: overall index, per-pair matrix, and mean
/// per balance category.
#[derive(Debug, Clone, Serialize)]
pub struct FrustrationReport {
    pub overall: f64,
    /// `pairwise[r][s]`; `None` where no edges touch the pair. Diagonal unused.
    pub pairwise: Vec<Vec<Option<f64>>>,
    pub per_category_mean: BTreeMap<Category, f64>,
}

struct SignedPairCounts {
    pos: Vec<Vec<u64>>,
    total: Vec<Vec<u64>>,
    neg_within: Vec<u64>,
}

fn signed_pair_counts(g: &SignedGraph, p: &Partition) -> Result<SignedPairCounts> {
    if p.node_count() != g.node_count() {
        return Err(Error::SizeMismatch {
            partition_nodes: p.node_count(),
            graph_nodes: g.node_count(),
        });
    }
    let b = p.block_count();
    let mut pos = vec![vec![0u64; b]; b];
    let mut total = vec![vec![0u64; b]; b];
    let mut neg_within = vec![0u64; b];
    for &(u, v, s) in g.edges() {
        let (r, t) = (p.block_of(u) as usize, p.block_of(v) as usize);
        let (lo, hi) = (r.min(t), r.max(t));
        total[lo][hi] += 1;
        if s > 0 {
            pos[lo][hi] += 1;
        } else if lo == hi {
            neg_within[lo] += 1;
        }
    }
    Ok(SignedPairCounts {
        pos,
        total,
        neg_within,
    })
}

/// Pairwise frustration matrix: per community pair, the fraction of misplaced
/// edges (positive between, negative within either block) among all edges
/// touching the pair. Entries with no edges at all are `None`.
pub fn pairwise_frustration(g: &SignedGraph, p: &Partition) -> Result<Vec<Vec<Option<f64>>>> {
    let counts = signed_pair_counts(g, p)?;
    let b = p.block_count();
    let mut out = vec![vec![None; b]; b];
    for r in 0..b {
        for s in (r + 1)..b {
            let denominator = counts.total[r][r] + counts.total[s][s] + counts.total[r][s];
            if denominator > 0 {
                let misplaced =
                    counts.pos[r][s] + counts.neg_within[r] + counts.neg_within[s];
                let fi = misplaced as f64 / denominator as f64;
                out[r][s] = Some(fi);
                out[s][r] = Some(fi);
            }
        }
    }
    Ok(out)
}

/// Overall frustration index: misplaced edges (negative within any block,
/// positive between blocks) over all edges.
pub fn overall_frustration(g: &SignedGraph, p: &Partition) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(Error::Degenerate("frustration undefined on empty graph".into()));
    }
    let counts = signed_pair_counts(g, p)?;
    let b = p.block_count();
    let mut misplaced = 0u64;
    for r in 0..b {
        misplaced += counts.neg_within[r];
        for s in (r + 1)..b {
            misplaced += counts.pos[r][s];
        }
    }
    Ok(misplaced as f64 / g.edge_count() as f64)
}

/// Assembles the full frustration report, averaging the pairwise index per
/// balance category of the supplied classification.
pub fn frustration_report(
    g: &SignedGraph,
    p: &Partition,
    relations: &[PairRelation],
) -> Result<FrustrationReport> {
    let overall = overall_frustration(g, p)?;
    let pairwise = pairwise_frustration(g, p)?;
    let mut sums: BTreeMap<Category, (f64, usize)> = BTreeMap::new();
    for rel in relations {
        if let Some(fi) = pairwise[rel.first][rel.second] {
            let entry = sums.entry(rel.category).or_insert((0.0, 0));
            entry.0 += fi;
            entry.1 += 1;
        }
    }
    let per_category_mean = sums
        .into_iter()
        .map(|(cat, (sum, count))| (cat, sum / count as f64))
        .collect();
    Ok(FrustrationReport {
        overall,
        pairwise,
        per_category_mean,
    })
}
