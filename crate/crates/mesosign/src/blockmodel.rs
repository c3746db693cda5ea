use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::partition::Partition;
use crate::rng::{self, stream};

/// A fitted two-channel Bernoulli block model: per block pair, independent
/// probabilities of a positive edge, a negative edge, or no edge on each
/// dyad.
#[derive(Debug, Clone, Serialize)]
pub struct BlockModelFit {
    pub partition: Partition,
    pub p_pos: Vec<Vec<f64>>,
    pub p_neg: Vec<Vec<f64>>,
    pub description_length: f64,
}

/// Dyad and signed-edge counts per block pair, the sufficient statistics of
/// the model.
struct BlockCounts {
    b: usize,
    sizes: Vec<usize>,
    e_pos: Vec<Vec<u64>>,
    e_neg: Vec<Vec<u64>>,
}

impl BlockCounts {
    fn from_partition(g: &SignedGraph, assignment: &[u32], b: usize) -> BlockCounts {
        let mut sizes = vec![0usize; b];
        for &a in assignment {
            sizes[a as usize] += 1;
        }
        let mut e_pos = vec![vec![0u64; b]; b];
        let mut e_neg = vec![vec![0u64; b]; b];
        for &(u, v, s) in g.edges() {
            let (r, t) = (assignment[u as usize] as usize, assignment[v as usize] as usize);
            let m = if s > 0 { &mut e_pos } else { &mut e_neg };
            m[r][t] += 1;
            if r != t {
                m[t][r] += 1;
            }
        }
        BlockCounts {
            b,
            sizes,
            e_pos,
            e_neg,
        }
    }

    fn dyads(&self, r: usize, s: usize) -> u64 {
        if r == s {
            (self.sizes[r] as u64 * (self.sizes[r] as u64).saturating_sub(1)) / 2
        } else {
            self.sizes[r] as u64 * self.sizes[s] as u64
        }
    }

    fn log_likelihood(&self) -> f64 {
        let mut total = 0.0;
        for r in 0..self.b {
            for s in r..self.b {
                total += pair_term(self.e_pos[r][s], self.e_neg[r][s], self.dyads(r, s));
            }
        }
        total
    }
}

/// Profiled log-likelihood of one block pair at its MLE probabilities, with
/// the 0 ln 0 := 0 convention.
#[inline]
fn pair_term(e_pos: u64, e_neg: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n_f = n as f64;
    let zero = n - e_pos - e_neg;
    let mut t = 0.0;
    if e_pos > 0 {
        t += e_pos as f64 * (e_pos as f64 / n_f).ln();
    }
    if e_neg > 0 {
        t += e_neg as f64 * (e_neg as f64 / n_f).ln();
    }
    if zero > 0 {
        t += zero as f64 * (zero as f64 / n_f).ln();
    }
    t
}

fn penalty(n: usize, b: usize) -> f64 {
    let dyads = n as f64 * (n as f64 - 1.0) / 2.0;
    let param_cost = if dyads > 0.0 {
        (b as f64 * (b as f64 + 1.0) / 2.0) * dyads.ln()
    } else {
        0.0
    };
    param_cost + n as f64 * (b as f64).ln()
}

/// Description length (nats) of `g` under the block model at the MLE for the
/// given partition: negative maximized log-likelihood plus a BIC-style
/// parameter cost and an `N ln B` label cost.
pub fn description_length(g: &SignedGraph, p: &Partition) -> Result<f64> {
    if p.node_count() != g.node_count() {
        return Err(Error::SizeMismatch {
            partition_nodes: p.node_count(),
            graph_nodes: g.node_count(),
        });
    }
    let counts = BlockCounts::from_partition(g, p.assignment(), p.block_count());
    Ok(-counts.log_likelihood() + penalty(g.node_count(), p.block_count()))
}

/// Gain in log-likelihood for moving `node` from its block to `target`,
/// evaluated over the affected block pairs only.
fn move_gain(
    counts: &BlockCounts,
    node_pos: &[u64],
    node_neg: &[u64],
    from: usize,
    target: usize,
) -> f64 {
    debug_assert_ne!(from, target);
    let b = counts.b;
    let mut old = 0.0;
    let mut new = 0.0;
    let size = |blk: usize, after: bool| -> u64 {
        let mut s = counts.sizes[blk] as u64;
        if after {
            if blk == from {
                s -= 1;
            }
            if blk == target {
                s += 1;
            }
        }
        s
    };
    let dyads = |r: usize, s: usize, after: bool| -> u64 {
        if r == s {
            let sz = size(r, after);
            sz * sz.saturating_sub(1) / 2
        } else {
            size(r, after) * size(s, after)
        }
    };
    for other in 0..b {
        // (from, other) pairs
        let (r, s) = (from.min(other), from.max(other));
        let (mut ep, mut en) = (counts.e_pos[r][s], counts.e_neg[r][s]);
        old += pair_term(ep, en, dyads(r, s, false));
        if other == from {
            ep -= node_pos[from];
            en -= node_neg[from];
        } else if other == target {
            // edges from node into `from` now run between from and target;
            // edges into `target` leave the pair.
            ep = ep + node_pos[from] - node_pos[target];
            en = en + node_neg[from] - node_neg[target];
        } else {
            ep -= node_pos[other];
            en -= node_neg[other];
        }
        new += pair_term(ep, en, dyads(r, s, true));
        // (target, other) pairs, skipping the (from,target) pair already done
        if other != from {
            let (r, s) = (target.min(other), target.max(other));
            let (mut ep, mut en) = (counts.e_pos[r][s], counts.e_neg[r][s]);
            old += pair_term(ep, en, dyads(r, s, false));
            if other == target {
                ep += node_pos[target];
                en += node_neg[target];
            } else {
                ep += node_pos[other];
                en += node_neg[other];
            }
            new += pair_term(ep, en, dyads(r, s, true));
        }
    }
    new - old
}

fn apply_move(
    counts: &mut BlockCounts,
    node_pos: &[u64],
    node_neg: &[u64],
    from: usize,
    target: usize,
) {
    let b = counts.b;
    for other in 0..b {
        let (dp, dn) = (node_pos[other], node_neg[other]);
        if dp == 0 && dn == 0 {
            continue;
        }
        let (fr, fs) = (from.min(other), from.max(other));
        let (tr, ts) = (target.min(other), target.max(other));
        if other == from {
            counts.e_pos[fr][fs] -= dp;
            counts.e_neg[fr][fs] -= dn;
            let (r, s) = (from.min(target), from.max(target));
            counts.e_pos[r][s] += dp;
            counts.e_neg[r][s] += dn;
            if r != s {
                counts.e_pos[s][r] += dp;
                counts.e_neg[s][r] += dn;
            }
            counts.e_pos[fs][fr] = counts.e_pos[fr][fs];
            counts.e_neg[fs][fr] = counts.e_neg[fr][fs];
        } else if other == target {
            let (r, s) = (from.min(target), from.max(target));
            counts.e_pos[r][s] -= dp;
            counts.e_neg[r][s] -= dn;
            counts.e_pos[s][r] = counts.e_pos[r][s];
            counts.e_neg[s][r] = counts.e_neg[r][s];
            counts.e_pos[tr][ts] += dp;
            counts.e_neg[tr][ts] += dn;
        } else {
            counts.e_pos[fr][fs] -= dp;
            counts.e_neg[fr][fs] -= dn;
            counts.e_pos[fs][fr] = counts.e_pos[fr][fs];
            counts.e_neg[fs][fr] = counts.e_neg[fr][fs];
            counts.e_pos[tr][ts] += dp;
            counts.e_neg[tr][ts] += dn;
            counts.e_pos[ts][tr] = counts.e_pos[tr][ts];
            counts.e_neg[ts][tr] = counts.e_neg[tr][ts];
        }
    }
    counts.sizes[from] -= 1;
    counts.sizes[target] += 1;
}

/// One greedy fit at a fixed number of slots `b`: seeded random start, then
/// best-gain single-node moves until a full sweep finds no improvement.
fn greedy_fit(g: &SignedGraph, b: usize, seed: u64, restart: u64) -> Vec<u32> {
    let n = g.node_count();
    let mut rng = rng::stream_rng(seed, &[stream::BLOCKMODEL, b as u64, restart]);
    let mut assignment: Vec<u32> = (0..n).map(|_| rng.random_range(0..b as u32)).collect();
    let mut counts = BlockCounts::from_partition(g, &assignment, b);
    let mut order: Vec<usize> = (0..n).collect();
    let mut node_pos = vec![0u64; b];
    let mut node_neg = vec![0u64; b];
    loop {
        order.shuffle(&mut rng);
        let mut moved = false;
        for &node in &order {
            let from = assignment[node] as usize;
            node_pos.fill(0);
            node_neg.fill(0);
            for &(nbr, s) in g.neighbors(node as u32) {
                let blk = assignment[nbr as usize] as usize;
                if s > 0 {
                    node_pos[blk] += 1;
                } else {
                    node_neg[blk] += 1;
                }
            }
            let mut best_target = from;
            let mut best_gain = 1e-9;
            for target in 0..b {
                if target == from {
                    continue;
                }
                let gain = move_gain(&counts, &node_pos, &node_neg, from, target);
                if gain > best_gain {
                    best_gain = gain;
                    best_target = target;
                }
            }
            if best_target != from {
                apply_move(&mut counts, &node_pos, &node_neg, from, best_target);
                assignment[node] = best_target as u32;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    assignment
}

/// Fits the two-channel Bernoulli block model, selecting the number of blocks
/// in `1..=b_max` by minimum description length over greedy restarts.
/// Deterministic given `seed`.
pub fn fit_blockmodel(
    g: &SignedGraph,
    b_max: usize,
    seed: u64,
    restarts: usize,
) -> Result<BlockModelFit> {
    if b_max < 1 {
        return Err(Error::InvalidParameter("b_max must be at least 1".into()));
    }
    if g.node_count() == 0 {
        return Err(Error::Degenerate("empty graph".into()));
    }
    let restarts = restarts.max(1);
    let tasks: Vec<(usize, u64)> = (1..=b_max.min(g.node_count()))
        .flat_map(|b| (0..restarts as u64).map(move |r| (b, r)))
        .collect();
    let candidates: Vec<(f64, Partition)> = tasks
        .into_par_iter()
        .map(|(b, r)| {
            let assignment = greedy_fit(g, b, seed, r);
            let p = Partition::from_labels(&assignment);
            let dl = description_length(g, &p).expect("assignment covers graph");
            (dl, p)
        })
        .collect();
    let best = candidates
        .into_iter()
        .min_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(a.1.block_count().cmp(&b.1.block_count()))
                .then_with(|| a.1.assignment().cmp(b.1.assignment()))
        })
        .expect("at least one candidate");
    Ok(fit_at_partition(g, best.1))
}

/// MLE fit at a fixed, externally supplied partition.
pub fn fit_with_partition(g: &SignedGraph, p: &Partition) -> Result<BlockModelFit> {
    if p.node_count() != g.node_count() {
        return Err(Error::SizeMismatch {
            partition_nodes: p.node_count(),
            graph_nodes: g.node_count(),
        });
    }
    Ok(fit_at_partition(g, p.clone()))
}

fn fit_at_partition(g: &SignedGraph, p: Partition) -> BlockModelFit {
    let b = p.block_count();
    let counts = BlockCounts::from_partition(g, p.assignment(), b);
    let mut p_pos = vec![vec![0.0; b]; b];
    let mut p_neg = vec![vec![0.0; b]; b];
    for r in 0..b {
        for s in r..b {
            let n = counts.dyads(r, s);
            if n > 0 {
                p_pos[r][s] = counts.e_pos[r][s] as f64 / n as f64;
                p_neg[r][s] = counts.e_neg[r][s] as f64 / n as f64;
                p_pos[s][r] = p_pos[r][s];
                p_neg[s][r] = p_neg[r][s];
            }
        }
    }
    let dl = -counts.log_likelihood() + penalty(g.node_count(), b);
    BlockModelFit {
        partition: p,
        p_pos,
        p_neg,
        description_length: dl,
    }
}

/// Samples one signed network from the fitted model: every dyad draws
/// positive / negative / absent with its block pair's probabilities. Block
/// memberships stay those of the fit.
pub fn sample_from_blockmodel(fit: &BlockModelFit, seed: u64) -> SignedGraph {
    let n = fit.partition.node_count();
    let mut rng = rng::stream_rng(seed, &[stream::BLOCKMODEL_SAMPLE]);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            let (r, s) = (
                fit.partition.block_of(u) as usize,
                fit.partition.block_of(v) as usize,
            );
            let x: f64 = rng.random();
            if x < fit.p_pos[r][s] {
                edges.push((u, v, 1i8));
            } else if x < fit.p_pos[r][s] + fit.p_neg[r][s] {
                edges.push((u, v, -1i8));
            }
        }
    }
    SignedGraph::new(n, edges).expect("sampled dyads are simple by construction")
}
