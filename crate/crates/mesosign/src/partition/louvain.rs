use std::collections::HashMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::partition::{signed_modularity, Partition};
use crate::rng::{self, stream};

const GAIN_EPS: f64 = 1e-12;

/// One sign channel of the (possibly aggregated) working graph. Edge weights
/// are integer-valued counts, so all arithmetic over them is exact.
#[derive(Clone)]
struct Channel {
    adj: Vec<HashMap<usize, f64>>,
    /// Twice the internal weight attached to each supernode.
    self_loop: Vec<f64>,
    /// 2L of the channel in the original graph; constant across levels.
    two_l: f64,
}

impl Channel {
    fn node_degree(&self, i: usize) -> f64 {
        self.adj[i].values().sum::<f64>() + self.self_loop[i]
    }
}

struct LevelGraph {
    n: usize,
    pos: Channel,
    neg: Channel,
}

impl LevelGraph {
    fn from_signed(g: &SignedGraph) -> LevelGraph {
        let n = g.node_count();
        let mut pos = Channel {
            adj: vec![HashMap::new(); n],
            self_loop: vec![0.0; n],
            two_l: 2.0 * g.positive_edge_count() as f64,
        };
        let mut neg = Channel {
            adj: vec![HashMap::new(); n],
            self_loop: vec![0.0; n],
            two_l: 2.0 * g.negative_edge_count() as f64,
        };
        for &(u, v, s) in g.edges() {
            let ch = if s > 0 { &mut pos } else { &mut neg };
            *ch.adj[u as usize].entry(v as usize).or_insert(0.0) += 1.0;
            *ch.adj[v as usize].entry(u as usize).or_insert(0.0) += 1.0;
        }
        LevelGraph { n, pos, neg }
    }

    /// Collapses communities into supernodes. `comm` must use contiguous ids.
    fn aggregate(&self, comm: &[usize], n_comms: usize) -> LevelGraph {
        let mut out = LevelGraph {
            n: n_comms,
            pos: Channel {
                adj: vec![HashMap::new(); n_comms],
                self_loop: vec![0.0; n_comms],
                two_l: self.pos.two_l,
            },
            neg: Channel {
                adj: vec![HashMap::new(); n_comms],
                self_loop: vec![0.0; n_comms],
                two_l: self.neg.two_l,
            },
        };
        for i in 0..self.n {
            let ci = comm[i];
            for (ch_in, ch_out) in [(&self.pos, &mut out.pos), (&self.neg, &mut out.neg)] {
                ch_out.self_loop[ci] += ch_in.self_loop[i];
                for (&j, &w) in &ch_in.adj[i] {
                    let cj = comm[j];
                    if ci == cj {
                        // Each internal edge is seen from both endpoints, so
                        // this accumulates 2x the internal weight.
                        ch_out.self_loop[ci] += w;
                    } else {
                        *ch_out.adj[ci].entry(cj).or_insert(0.0) += w;
                    }
                }
            }
        }
        out
    }
}

/// Per-channel modularity change (times 2L of the whole graph) for moving
/// node `i` from its community into `target`, given community degree sums.
#[inline]
fn channel_gain(
    two_l: f64,
    d_i: f64,
    k_to_target: f64,
    k_to_current_rest: f64,
    deg_current: f64,
    deg_target: f64,
) -> f64 {
    if two_l == 0.0 {
        return 0.0;
    }
    2.0 * (k_to_target - k_to_current_rest)
        + 2.0 * d_i * (deg_current - deg_target - d_i) / two_l
}

struct MoveState {
    comm: Vec<usize>,
    comm_size: Vec<usize>,
    deg_pos: Vec<f64>,
    deg_neg: Vec<f64>,
    /// Lowest-index empty slot, kept as the candidate for splitting off.
    empty_slot: usize,
}

impl MoveState {
    fn new(level: &LevelGraph) -> MoveState {
        let n = level.n;
        MoveState::from_assignment(level, (0..n).collect())
    }

    fn from_assignment(level: &LevelGraph, comm: Vec<usize>) -> MoveState {
        let n = level.n;
        let mut s = MoveState {
            comm,
            comm_size: vec![0; n + 1],
            deg_pos: vec![0.0; n + 1],
            deg_neg: vec![0.0; n + 1],
            empty_slot: 0,
        };
        for i in 0..n {
            let c = s.comm[i];
            s.comm_size[c] += 1;
            s.deg_pos[c] += level.pos.node_degree(i);
            s.deg_neg[c] += level.neg.node_degree(i);
        }
        s.empty_slot = s.find_empty_slot();
        s
    }

    fn find_empty_slot(&self) -> usize {
        self.comm_size
            .iter()
            .position(|&s| s == 0)
            .expect("one slot more than nodes guarantees an empty slot")
    }
}

/// One level of local moves. Scans every community (plus one empty slot) as a
/// move target so the result is stable against arbitrary single-node
/// relabelings, not just moves to neighboring communities.
fn local_moves(level: &LevelGraph, state: &mut MoveState, order: &[usize]) -> bool {
    let n_slots = state.comm_size.len();
    let mut k_pos = vec![0.0; n_slots];
    let mut k_neg = vec![0.0; n_slots];
    let mut touched: Vec<usize> = Vec::new();
    let mut any_move = false;
    loop {
        let mut moved_this_sweep = false;
        for &i in order {
            let current = state.comm[i];
            for &c in &touched {
                k_pos[c] = 0.0;
                k_neg[c] = 0.0;
            }
            touched.clear();
            for (&j, &w) in &level.pos.adj[i] {
                let cj = state.comm[j];
                if k_pos[cj] == 0.0 && k_neg[cj] == 0.0 {
                    touched.push(cj);
                }
                k_pos[cj] += w;
            }
            for (&j, &w) in &level.neg.adj[i] {
                let cj = state.comm[j];
                if k_pos[cj] == 0.0 && k_neg[cj] == 0.0 {
                    touched.push(cj);
                }
                k_neg[cj] += w;
            }
            if !touched.contains(&current) {
                touched.push(current);
            }
            let d_pos = level.pos.node_degree(i);
            let d_neg = level.neg.node_degree(i);
            let mut best_target = current;
            let mut best_gain = 0.0;
            for target in 0..n_slots {
                if target == current {
                    continue;
                }
                let occupied = state.comm_size[target] > 0;
                if !occupied && target != state.empty_slot {
                    continue;
                }
                let gain_pos = channel_gain(
                    level.pos.two_l,
                    d_pos,
                    k_pos[target],
                    k_pos[current],
                    state.deg_pos[current],
                    state.deg_pos[target],
                );
                let gain_neg = channel_gain(
                    level.neg.two_l,
                    d_neg,
                    k_neg[target],
                    k_neg[current],
                    state.deg_neg[current],
                    state.deg_neg[target],
                );
                let gain = gain_pos - gain_neg;
                // Strict improvement required; ties stay, and among
                // improving targets ties go to the lowest slot id because of
                // the ascending scan.
                if gain > best_gain + GAIN_EPS {
                    best_gain = gain;
                    best_target = target;
                }
            }
            if best_target != current {
                state.comm[i] = best_target;
                state.comm_size[current] -= 1;
                state.comm_size[best_target] += 1;
                state.deg_pos[current] -= d_pos;
                state.deg_pos[best_target] += d_pos;
                state.deg_neg[current] -= d_neg;
                state.deg_neg[best_target] += d_neg;
                if best_target == state.empty_slot || state.comm_size[current] == 0 {
                    state.empty_slot = state.find_empty_slot();
                }
                moved_this_sweep = true;
                any_move = true;
            }
        }
        if !moved_this_sweep {
            break;
        }
    }
    any_move
}

fn compact(comm: &[usize]) -> (Vec<usize>, usize) {
    let mut map: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::with_capacity(comm.len());
    for &c in comm {
        let next = map.len();
        out.push(*map.entry(c).or_insert(next));
    }
    let n = map.len();
    (out, n)
}

fn louvain_single_run(g: &SignedGraph, seed: u64, restart: u64) -> Vec<u32> {
    use rand::Rng;
    let mut rng = rng::stream_rng(seed, &[stream::LOUVAIN, restart]);
    let mut level = LevelGraph::from_signed(g);
    // node -> community of the original graph, composed across levels
    let mut membership: Vec<usize> = (0..g.node_count()).collect();
    let mut first_level = true;
    loop {
        // Restart 0 starts from singletons; later restarts scatter the first
        // level over a random number of blocks so they explore basins that
        // improving moves cannot reach from singletons.
        let mut state = if first_level && restart > 0 && level.n > 1 {
            let blocks = rng.random_range(1..=level.n);
            let init: Vec<usize> = (0..level.n).map(|_| rng.random_range(0..blocks)).collect();
            MoveState::from_assignment(&level, init)
        } else {
            MoveState::new(&level)
        };
        first_level = false;
        let mut order: Vec<usize> = (0..level.n).collect();
        order.shuffle(&mut rng);
        local_moves(&level, &mut state, &order);
        let (compacted, n_comms) = compact(&state.comm);
        for m in &mut membership {
            *m = compacted[*m];
        }
        if n_comms == level.n {
            break;
        }
        level = level.aggregate(&compacted, n_comms);
    }
    membership.iter().map(|&c| c as u32).collect()
}

/// Louvain maximization of signed modularity.
///
/// Runs `restarts` independent randomized passes and keeps the partition with
/// the highest `q_signed`; deterministic for a given `(seed, restarts)`.
/// Isolated nodes end up in singleton blocks.
pub fn louvain_signed(g: &SignedGraph, seed: u64, restarts: usize) -> Result<Partition> {
    if g.node_count() == 0 {
        return Err(Error::Degenerate("empty graph".into()));
    }
    let restarts = restarts.max(1);
    let runs: Vec<Vec<u32>> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| louvain_single_run(g, seed, r))
        .collect();
    let mut best: Option<(f64, Partition)> = None;
    for labels in runs {
        let p = Partition::from_labels(&labels);
        let q = signed_modularity(g, &p)?.q_signed;
        match &best {
            Some((bq, _)) if q <= bq + GAIN_EPS => {}
            _ => best = Some((q, p)),
        }
    }
    Ok(best.expect("at least one restart").1)
}

/// Exhaustive single-move stability scan: true when no relabeling of one node
/// (to any existing block or a fresh one) increases `q_signed`.
pub fn is_node_move_stable(g: &SignedGraph, p: &Partition) -> Result<bool> {
    let base = signed_modularity(g, p)?.q_signed;
    let b = p.block_count() as u32;
    for node in 0..g.node_count() as u32 {
        let original = p.block_of(node);
        for target in 0..=b {
            if target == original {
                continue;
            }
            let mut labels = p.assignment().to_vec();
            labels[node as usize] = target;
            let q = signed_modularity(g, &Partition::from_labels(&labels))?.q_signed;
            if q > base + 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
