mod louvain;
mod spectral;

pub use louvain::{is_node_move_stable, louvain_signed};
pub use spectral::spectral_signed;

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SignedGraph;

/// A node-to-block assignment with contiguous labels `0..B` and no empty
/// blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    assignment: Vec<u32>,
    block_count: usize,
    block_sizes: Vec<usize>,
}

impl Partition {
    /// Builds a partition from arbitrary per-node labels, compacting them to
    /// `0..B` in order of first occurrence.
    pub fn from_labels<L: Hash + Eq>(labels: &[L]) -> Partition {
        let mut map: HashMap<&L, u32> = HashMap::new();
        let mut assignment = Vec::with_capacity(labels.len());
        let mut block_sizes = Vec::new();
        for label in labels {
            let next = map.len() as u32;
            let id = *map.entry(label).or_insert(next);
            if id == next {
                block_sizes.push(0);
            }
            block_sizes[id as usize] += 1;
            assignment.push(id);
        }
        Partition {
            assignment,
            block_count: block_sizes.len(),
            block_sizes,
        }
    }

    /// All nodes in one block.
    pub fn single_block(n: usize) -> Partition {
        Partition {
            assignment: vec![0; n],
            block_count: usize::from(n > 0),
            block_sizes: if n > 0 { vec![n] } else { vec![] },
        }
    }

    /// Every node its own block.
    pub fn singletons(n: usize) -> Partition {
        Partition {
            assignment: (0..n as u32).collect(),
            block_count: n,
            block_sizes: vec![1; n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn block_of(&self, node: u32) -> u32 {
        self.assignment[node as usize]
    }

    /// Member lists per block, each sorted by node id.
    pub fn blocks(&self) -> Vec<Vec<u32>> {
        let mut blocks = vec![Vec::new(); self.block_count];
        for (node, &b) in self.assignment.iter().enumerate() {
            blocks[b as usize].push(node as u32);
        }
        blocks
    }

    /// True if both assignments induce the same set partition, regardless of
    /// block labels.
    pub fn same_set_partition(&self, other: &Partition) -> bool {
        if self.assignment.len() != other.assignment.len()
            || self.block_count != other.block_count
        {
            return false;
        }
        let mut map = vec![u32::MAX; self.block_count];
        for (&a, &b) in self.assignment.iter().zip(&other.assignment) {
            if map[a as usize] == u32::MAX {
                map[a as usize] = b;
            } else if map[a as usize] != b {
                return false;
            }
        }
        true
    }

    fn check_covers(&self, g: &SignedGraph) -> Result<()> {
        if self.assignment.len() != g.node_count() {
            return Err(Error::SizeMismatch {
                partition_nodes: self.assignment.len(),
                graph_nodes: g.node_count(),
            });
        }
        Ok(())
    }

    /// Serializes as `node,label` CSV using the graph's original node labels.
    pub fn to_csv(&self, g: &SignedGraph) -> Result<String> {
        self.check_covers(g)?;
        let mut out = String::from("node,label\n");
        for (node, &b) in self.assignment.iter().enumerate() {
            out.push_str(g.label(node as u32));
            out.push(',');
            out.push_str(&b.to_string());
            out.push('\n');
        }
        Ok(out)
    }
}

/// Positive-channel, negative-channel, and combined signed modularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModularityScore {
    pub q_pos: f64,
    pub q_neg: f64,
    pub q_signed: f64,
}

/// Newman modularity of one sign channel under `p`, given per-block internal
/// edge counts and degree sums.
fn channel_modularity(intra: &[usize], degree: &[usize], total_edges: usize) -> f64 {
    if total_edges == 0 {
        return 0.0;
    }
    let m = total_edges as f64;
    intra
        .iter()
        .zip(degree)
        .map(|(&e_c, &d_c)| e_c as f64 / m - (d_c as f64 / (2.0 * m)).powi(2))
        .sum()
}

/// Signed modularity: the positive channel's modularity rewarded, the
/// negative channel's penalized, weighted by edge counts:
/// `q = (2L+ q+ - 2L- q-) / (2L+ + 2L-)`.
pub fn signed_modularity(g: &SignedGraph, p: &Partition) -> Result<ModularityScore> {
    p.check_covers(g)?;
    let b = p.block_count();
    let mut intra_pos = vec![0usize; b];
    let mut intra_neg = vec![0usize; b];
    let mut deg_pos = vec![0usize; b];
    let mut deg_neg = vec![0usize; b];
    for &(u, v, s) in g.edges() {
        let (bu, bv) = (p.block_of(u) as usize, p.block_of(v) as usize);
        if s > 0 {
            deg_pos[bu] += 1;
            deg_pos[bv] += 1;
            if bu == bv {
                intra_pos[bu] += 1;
            }
        } else {
            deg_neg[bu] += 1;
            deg_neg[bv] += 1;
            if bu == bv {
                intra_neg[bu] += 1;
            }
        }
    }
    let l_pos = g.positive_edge_count();
    let l_neg = g.negative_edge_count();
    let q_pos = channel_modularity(&intra_pos, &deg_pos, l_pos);
    let q_neg = channel_modularity(&intra_neg, &deg_neg, l_neg);
    let denom = 2.0 * (l_pos + l_neg) as f64;
    let q_signed = if denom > 0.0 {
        (2.0 * l_pos as f64 * q_pos - 2.0 * l_neg as f64 * q_neg) / denom
    } else {
        0.0
    };
    Ok(ModularityScore {
        q_pos,
        q_neg,
        q_signed,
    })
}

/// Parses a `node,label` CSV into a partition over `g`.
///
/// Node names refer to the graph's original labels; every node must appear
/// exactly once. Labels are compacted in first-occurrence order.
pub fn import_partition(text: &str, g: &SignedGraph) -> Result<Partition> {
    let n = g.node_count();
    let mut raw: Vec<Option<String>> = vec![None; n];
    for (idx, line_raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line_raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (node_tok, label_tok) = match line.split_once(',') {
            Some(pair) => pair,
            None => return Err(Error::parse(line_no, "expected 'node,label'")),
        };
        let node_tok = node_tok.trim();
        let label_tok = label_tok.trim();
        if idx == 0 && node_tok.eq_ignore_ascii_case("node") && label_tok.eq_ignore_ascii_case("label")
        {
            continue;
        }
        let id = g
            .id_of(node_tok)
            .ok_or_else(|| Error::parse(line_no, format!("unknown node '{node_tok}'")))?;
        if raw[id as usize].is_some() {
            return Err(Error::parse(line_no, format!("duplicate node '{node_tok}'")));
        }
        raw[id as usize] = Some(label_tok.to_string());
    }
    let missing: Vec<&str> = raw
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_none())
        .map(|(i, _)| g.label(i as u32))
        .collect();
    if !missing.is_empty() {
        return Err(Error::validation(format!(
            "partition missing nodes: {}",
            missing.join(", ")
        )));
    }
    let labels: Vec<String> = raw.into_iter().map(|v| v.unwrap()).collect();
    Ok(Partition::from_labels(&labels))
}
