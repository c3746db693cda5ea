use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::partition::Partition;
use crate::rng::{self, stream};

/// Default float guard for the density comparisons; exact ties classify as
/// core-periphery, the middle case of the trichotomy.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relationship of one channel of a community pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairClass {
    #[serde(rename = "A")]
    Assortative,
    #[serde(rename = "C")]
    CorePeriphery,
    #[serde(rename = "D")]
    Disassortative,
}

impl PairClass {
    pub fn letter(self) -> char {
        match self {
            PairClass::Assortative => 'A',
            PairClass::CorePeriphery => 'C',
            PairClass::Disassortative => 'D',
        }
    }
}

/// Balance category of a community pair (Fig-3-style grouping of the 18
/// types).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Category {
    #[serde(rename = "balanced")]
    Balanced,
    #[serde(rename = "unbalanced")]
    Unbalanced,
    #[serde(rename = "anti-balanced")]
    AntiBalanced,
}

/// The positive and negative edge-density matrices of a partitioned signed
/// graph.
#[derive(Debug, Clone, Serialize)]
pub struct DensityPair {
    pub w_pos: Vec<Vec<f64>>,
    pub w_neg: Vec<Vec<f64>>,
    pub block_sizes: Vec<usize>,
    /// Blocks whose diagonal density is undefined (singletons); reported as 0.
    pub degenerate_blocks: Vec<bool>,
}

impl DensityPair {
    pub fn block_count(&self) -> usize {
        self.block_sizes.len()
    }
}

/// Classified relationship of one community pair. `first`/`second` are block
/// ids in canonical order: the block with the larger positive diagonal
/// density comes first (ties: lower block id). They serialize as `r`/`s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRelation {
    #[serde(rename = "r")]
    pub first: usize,
    #[serde(rename = "s")]
    pub second: usize,
    pub pos_type: PairClass,
    pub neg_type: PairClass,
    /// Negative-channel diagonal ordering opposite to the positive one.
    pub prime: bool,
    pub score: i8,
    pub category: Category,
    /// Bootstrap certainty, when computed.
    pub robustness: Option<f64>,
    /// No positive (resp. negative) edges touch this pair at all.
    pub degenerate_pos: bool,
    pub degenerate_neg: bool,
    /// A singleton block forced a 0 diagonal into the comparison.
    pub low_confidence: bool,
}

impl PairRelation {
    /// Census label, e.g. `A+|D'-`.
    pub fn label(&self) -> String {
        format!(
            "{}+|{}{}-",
            self.pos_type.letter(),
            self.neg_type.letter(),
            if self.prime { "'" } else { "" }
        )
    }

    fn type_index(&self) -> usize {
        let pos = match self.pos_type {
            PairClass::Assortative => 0,
            PairClass::CorePeriphery => 1,
            PairClass::Disassortative => 2,
        };
        let neg = match self.neg_type {
            PairClass::Assortative => 0,
            PairClass::CorePeriphery => 1,
            PairClass::Disassortative => 2,
        };
        pos * 6 + neg * 2 + usize::from(self.prime)
    }
}

/// The 18 census labels in canonical order.
pub fn census_labels() -> Vec<String> {
    let mut labels = Vec::with_capacity(18);
    for pos in ['A', 'C', 'D'] {
        for neg in ['A', 'C', 'D'] {
            for prime in ["", "'"] {
                labels.push(format!("{pos}+|{neg}{prime}-"));
            }
        }
    }
    labels
}

/// Counts of the 18 relationship types over all community pairs.
#[derive(Debug, Clone, Serialize)]
pub struct TypeCensus {
    pub labels: Vec<String>,
    pub counts: Vec<usize>,
    /// Most frequent label; ties go to the earliest label in census order.
    pub dominant_type: String,
    /// Labels occurring at least once.
    pub occurrence: Vec<String>,
}

impl TypeCensus {
    fn from_relations(relations: &[PairRelation]) -> TypeCensus {
        let labels = census_labels();
        let mut counts = vec![0usize; 18];
        for rel in relations {
            counts[rel.type_index()] += 1;
        }
        let dominant = counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| labels[i].clone())
            .unwrap_or_default();
        let occurrence = labels
            .iter()
            .zip(&counts)
            .filter(|(_, &c)| c > 0)
            .map(|(l, _)| l.clone())
            .collect();
        TypeCensus {
            labels,
            counts,
            dominant_type: dominant,
            occurrence,
        }
    }
}

/// Per-block-pair counts of positive and negative edges.
pub(crate) struct PairCounts {
    pub b: usize,
    pub pos: Vec<Vec<u64>>,
    pub neg: Vec<Vec<u64>>,
}

pub(crate) fn count_pair_edges(g: &SignedGraph, p: &Partition) -> PairCounts {
    let b = p.block_count();
    let mut pos = vec![vec![0u64; b]; b];
    let mut neg = vec![vec![0u64; b]; b];
    for &(u, v, s) in g.edges() {
        let (r, t) = (p.block_of(u) as usize, p.block_of(v) as usize);
        let m = if s > 0 { &mut pos } else { &mut neg };
        m[r][t] += 1;
        if r != t {
            m[t][r] += 1;
        }
    }
    PairCounts { b, pos, neg }
}

fn densities_from_counts(counts: &PairCounts, block_sizes: &[usize]) -> DensityPair {
    let b = counts.b;
    let mut w_pos = vec![vec![0.0; b]; b];
    let mut w_neg = vec![vec![0.0; b]; b];
    let mut degenerate = vec![false; b];
    for r in 0..b {
        for s in r..b {
            let denom = if r == s {
                let n = block_sizes[r] as f64;
                if block_sizes[r] < 2 {
                    degenerate[r] = true;
                    0.0
                } else {
                    n * (n - 1.0) / 2.0
                }
            } else {
                block_sizes[r] as f64 * block_sizes[s] as f64
            };
            if denom > 0.0 {
                w_pos[r][s] = counts.pos[r][s] as f64 / denom;
                w_neg[r][s] = counts.neg[r][s] as f64 / denom;
                w_pos[s][r] = w_pos[r][s];
                w_neg[s][r] = w_neg[r][s];
            }
        }
    }
    DensityPair {
        w_pos,
        w_neg,
        block_sizes: block_sizes.to_vec(),
        degenerate_blocks: degenerate,
    }
}

/// Edge-density matrices of `(g, p)`: the realized fraction of possible
/// positive and negative edges per block pair. Singleton-block diagonals are
/// reported as 0 and flagged degenerate.
pub fn density_matrices(g: &SignedGraph, p: &Partition) -> Result<DensityPair> {
    if p.node_count() != g.node_count() {
        return Err(Error::SizeMismatch {
            partition_nodes: p.node_count(),
            graph_nodes: g.node_count(),
        });
    }
    let counts = count_pair_edges(g, p);
    Ok(densities_from_counts(&counts, p.block_sizes()))
}

fn classify_channel(w_rs: f64, diag_first: f64, diag_second: f64, tol: f64) -> PairClass {
    let lo = diag_first.min(diag_second);
    let hi = diag_first.max(diag_second);
    if w_rs < lo - tol {
        PairClass::Assortative
    } else if w_rs > hi + tol {
        PairClass::Disassortative
    } else {
        PairClass::CorePeriphery
    }
}

/// Classifies the relationship of blocks `r` and `s` from the density
/// matrices.
///
/// The pair is first put in canonical order (larger positive diagonal first;
/// ties by block id). Each channel is assortative when the between density
/// lies below both diagonals, disassortative above both, and core-periphery
/// in between (ties resolve to core-periphery, making the trichotomy total).
/// The prime mark records a negative diagonal ordering opposite to the
/// positive one.
pub fn classify_pair(d: &DensityPair, r: usize, s: usize, tol: f64) -> Result<PairRelation> {
    let b = d.block_count();
    if r == s {
        return Err(Error::InvalidParameter(
            "cannot classify a block against itself".into(),
        ));
    }
    if r >= b || s >= b {
        return Err(Error::InvalidParameter(format!(
            "block pair ({r},{s}) out of range for B={b}"
        )));
    }
    let (first, second) = if d.w_pos[r][r] > d.w_pos[s][s] + tol {
        (r, s)
    } else if d.w_pos[s][s] > d.w_pos[r][r] + tol {
        (s, r)
    } else {
        (r.min(s), r.max(s))
    };
    let pos_type = classify_channel(d.w_pos[r][s], d.w_pos[first][first], d.w_pos[second][second], tol);
    let neg_type = classify_channel(d.w_neg[r][s], d.w_neg[first][first], d.w_neg[second][second], tol);
    let prime = d.w_neg[first][first] < d.w_neg[second][second] - tol;
    let s_pos: i8 = match pos_type {
        PairClass::Assortative => 1,
        PairClass::CorePeriphery => 0,
        PairClass::Disassortative => -1,
    };
    let s_neg: i8 = match neg_type {
        PairClass::Disassortative => 1,
        PairClass::CorePeriphery => 0,
        PairClass::Assortative => -1,
    };
    let score = s_pos + s_neg;
    let category = match (pos_type, neg_type) {
        (PairClass::Assortative, PairClass::Disassortative) => Category::Balanced,
        (PairClass::Disassortative, PairClass::Assortative) => Category::AntiBalanced,
        _ => Category::Unbalanced,
    };
    let degenerate_pos =
        d.w_pos[r][s] <= tol && d.w_pos[r][r] <= tol && d.w_pos[s][s] <= tol;
    let degenerate_neg =
        d.w_neg[r][s] <= tol && d.w_neg[r][r] <= tol && d.w_neg[s][s] <= tol;
    Ok(PairRelation {
        first,
        second,
        pos_type,
        neg_type,
        prime,
        score,
        category,
        robustness: None,
        degenerate_pos,
        degenerate_neg,
        low_confidence: d.degenerate_blocks[r] || d.degenerate_blocks[s],
    })
}

/// Classifies every community pair and aggregates the 18-type census.
pub fn classify_all(
    g: &SignedGraph,
    p: &Partition,
    tol: f64,
) -> Result<(Vec<PairRelation>, TypeCensus)> {
    if p.block_count() < 2 {
        return Err(Error::Degenerate(
            "nothing to classify: partition has fewer than 2 blocks".into(),
        ));
    }
    let d = density_matrices(g, p)?;
    let relations = classify_all_from_densities(&d, tol)?;
    let census = TypeCensus::from_relations(&relations);
    Ok((relations, census))
}

fn classify_all_from_densities(d: &DensityPair, tol: f64) -> Result<Vec<PairRelation>> {
    let b = d.block_count();
    let mut relations = Vec::with_capacity(b * (b - 1) / 2);
    for r in 0..b {
        for s in (r + 1)..b {
            relations.push(classify_pair(d, r, s, tol)?);
        }
    }
    Ok(relations)
}

/// Draws `count` indices in `0..count` with replacement.
fn resample_indices(rng: &mut rand_chacha::ChaCha12Rng, count: usize) -> Vec<usize> {
    use rand::Rng;
    (0..count).map(|_| rng.random_range(0..count)).collect()
}

/// Core of the bootstrap; `sampler(replicate, channel, count)` returns the
/// resampled edge indices (channel 0 = positive, 1 = negative). Tests inject
/// an identity sampler here. Replicates run in parallel; agreement counts
/// are integers, so the reduction is order-independent.
fn certainty_with_sampler(
    g: &SignedGraph,
    p: &Partition,
    k: usize,
    tol: f64,
    sampler: impl Fn(usize, usize, usize) -> Vec<usize> + Sync,
) -> Result<Vec<Vec<f64>>> {
    use rayon::prelude::*;
    let d = density_matrices(g, p)?;
    let base = classify_all_from_densities(&d, tol)?;
    let b = p.block_count();
    let pos_edges: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .filter(|e| e.2 > 0)
        .map(|&(u, v, _)| (u, v))
        .collect();
    let neg_edges: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .filter(|e| e.2 < 0)
        .map(|&(u, v, _)| (u, v))
        .collect();
    let per_replicate: Vec<Result<Vec<bool>>> = (0..k)
        .into_par_iter()
        .map(|rep| {
            let mut counts = PairCounts {
                b,
                pos: vec![vec![0u64; b]; b],
                neg: vec![vec![0u64; b]; b],
            };
            for (channel, (edges, matrix)) in
                [(&pos_edges, &mut counts.pos), (&neg_edges, &mut counts.neg)]
                    .into_iter()
                    .enumerate()
            {
                if edges.is_empty() {
                    continue;
                }
                for idx in sampler(rep, channel, edges.len()) {
                    let (u, v) = edges[idx];
                    let (r, t) = (p.block_of(u) as usize, p.block_of(v) as usize);
                    matrix[r][t] += 1;
                    if r != t {
                        matrix[t][r] += 1;
                    }
                }
            }
            let densities = densities_from_counts(&counts, p.block_sizes());
            let relations = classify_all_from_densities(&densities, tol)?;
            Ok(base
                .iter()
                .zip(&relations)
                .map(|(orig, rep_rel)| {
                    (orig.pos_type, orig.neg_type, orig.prime)
                        == (rep_rel.pos_type, rep_rel.neg_type, rep_rel.prime)
                })
                .collect())
        })
        .collect();
    let mut agreement = vec![0usize; base.len()];
    for replicate in per_replicate {
        for (slot, agreed) in agreement.iter_mut().zip(replicate?) {
            *slot += usize::from(agreed);
        }
    }
    let mut certainty = vec![vec![1.0; b]; b];
    for (rel, agreed) in base.iter().zip(agreement) {
        let fraction = agreed as f64 / k as f64;
        certainty[rel.first][rel.second] = fraction;
        certainty[rel.second][rel.first] = fraction;
    }
    Ok(certainty)
}

/// Bootstrap certainty of the pair classification.
///
/// Each replicate redraws `L+` positive and `L-` negative edges with
/// replacement from the observed edge sets (multiplicity counts in the
/// density numerators), reclassifies against the fixed partition, and
/// `P_rs` is the fraction of replicates reproducing the original 18-type
/// label. Diagonal entries are 1. Deterministic given `seed`.
pub fn bootstrap_certainty(
    g: &SignedGraph,
    p: &Partition,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "bootstrap needs at least 1 replicate".into(),
        ));
    }
    if p.block_count() < 2 {
        return Err(Error::Degenerate(
            "nothing to classify: partition has fewer than 2 blocks".into(),
        ));
    }
    certainty_with_sampler(g, p, k, tol, move |rep, channel, count| {
        let mut rng = rng::stream_rng(seed, &[stream::BOOTSTRAP, rep as u64, channel as u64]);
        resample_indices(&mut rng, count)
    })
}

/// Attaches bootstrap robustness values to a relation list.
pub fn attach_robustness(relations: &mut [PairRelation], certainty: &[Vec<f64>]) {
    for rel in relations {
        rel.robustness = Some(certainty[rel.first][rel.second]);
    }
}
