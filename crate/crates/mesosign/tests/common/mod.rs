//! Shared fixtures and independent oracles for the integration and
//! acceptance suites. Everything here is deliberately brute-force and
//! self-contained so it cannot share a code path with the implementations it
//! checks.

#![allow(dead_code)]

use mesosign::graph::SignedGraph;
use mesosign::partition::{signed_modularity, Partition};

/// Two positive 3-cliques with all nine cross pairs negative.
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
    SignedGraph::new(6, edges).unwrap()
}

pub fn g2x3_partition() -> Partition {
    Partition::from_labels(&[0, 0, 0, 1, 1, 1])
}

/// The G2x3 fixture as an undirected edge-list file body.
pub fn g2x3_file_text() -> String {
    let mut out = String::from("# balanced 6-node fixture\n");
    for &(u, v, s) in g2x3().edges() {
        out.push_str(&format!("{u} {v} {s}\n"));
    }
    out
}

/// All set partitions of `n` elements, as restricted-growth assignments.
pub fn set_partitions(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fn rec(current: &mut Vec<u32>, pos: usize, max_used: u32, out: &mut Vec<Vec<u32>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            current[pos] = label;
            rec(current, pos + 1, max_used.max(label), out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(&mut current, 1, 0, &mut out);
    out
}

/// Exhaustive maximum of signed modularity over all set partitions.
pub fn best_q_signed_exhaustive(g: &SignedGraph) -> f64 {
    set_partitions(g.node_count())
        .into_iter()
        .map(|labels| {
            signed_modularity(g, &Partition::from_labels(&labels))
                .unwrap()
                .q_signed
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exhaustive minimum description length over all set partitions.
pub fn best_dl_exhaustive(g: &SignedGraph) -> f64 {
    set_partitions(g.node_count())
        .into_iter()
        .map(|labels| {
            mesosign::blockmodel::description_length(g, &Partition::from_labels(&labels)).unwrap()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Triangle sign counts `[n_ppp, n_ppm, n_pmm, n_mmm]` via the trace
/// formulas on dense adjacency matrices, independent of the combinatorial
/// census.
pub fn trace_census(g: &SignedGraph) -> [u64; 4] {
    let n = g.node_count();
    let mut pos = vec![vec![0u64; n]; n];
    let mut neg = vec![vec![0u64; n]; n];
    for &(u, v, s) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        let m = if s > 0 { &mut pos } else { &mut neg };
        m[u][v] = 1;
        m[v][u] = 1;
    }
    let matmul = |a: &Vec<Vec<u64>>, b: &Vec<Vec<u64>>| -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; n]; n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i][k];
                if aik == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
        out
    };
    let trace_product = |a: &Vec<Vec<u64>>, b: &Vec<Vec<u64>>| -> u64 {
        let mut t = 0u64;
        for i in 0..n {
            for j in 0..n {
                t += a[i][j] * b[j][i];
            }
        }
        t
    };
    let pos2 = matmul(&pos, &pos);
    let neg2 = matmul(&neg, &neg);
    // Tr[(A+)^3] = 6 * n_ppp, Tr[(A+)^2 A-] = 2 * n_ppm,
    // Tr[A+ (A-)^2] = 2 * n_pmm, Tr[(A-)^3] = 6 * n_mmm.
    let n_ppp = trace_product(&pos2, &pos) / 6;
    let n_ppm = trace_product(&pos2, &neg) / 2;
    let n_pmm = trace_product(&neg2, &pos) / 2;
    let n_mmm = trace_product(&neg2, &neg) / 6;
    [n_ppp, n_ppm, n_pmm, n_mmm]
}

/// Deterministic pseudo-random signed graph for oracle sweeps (linear
/// congruential draws; nothing shared with the crate's generators).
pub fn lcg_signed_graph(n: usize, edge_prob_million: u64, neg_prob_million: u64, seed: u64) -> SignedGraph {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) % 1_000_000
    };
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if next() < edge_prob_million {
                let sign = if next() < neg_prob_million { -1 } else { 1 };
                edges.push((u, v, sign));
            }
        }
    }
    SignedGraph::new(n, edges).unwrap()
}
