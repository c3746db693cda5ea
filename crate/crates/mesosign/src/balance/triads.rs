use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::blockmodel::{sample_from_blockmodel, BlockModelFit};
use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::rng::{self, stream};

/// Counts and fractions of the four signed triangle types, with the degree of
/// balance (fraction of triads with an even number of negative edges) and its
/// weak variant (which also admits the all-negative triad).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriadCensus {
    pub n_ppp: u64,
    pub n_ppm: u64,
    pub n_pmm: u64,
    pub n_mmm: u64,
    pub t_ppp: Option<f64>,
    pub t_ppm: Option<f64>,
    pub t_pmm: Option<f64>,
    pub t_mmm: Option<f64>,
    pub dob: Option<f64>,
    pub wdob: Option<f64>,
}

impl TriadCensus {
    pub fn total(&self) -> u64 {
        self.n_ppp + self.n_ppm + self.n_pmm + self.n_mmm
    }

    fn from_counts(counts: [u64; 4]) -> TriadCensus {
        let [n_ppp, n_ppm, n_pmm, n_mmm] = counts;
        let total = n_ppp + n_ppm + n_pmm + n_mmm;
        let frac = |c: u64| {
            if total > 0 {
                Some(c as f64 / total as f64)
            } else {
                None
            }
        };
        TriadCensus {
            n_ppp,
            n_ppm,
            n_pmm,
            n_mmm,
            t_ppp: frac(n_ppp),
            t_ppm: frac(n_ppm),
            t_pmm: frac(n_pmm),
            t_mmm: frac(n_mmm),
            dob: frac(n_ppp + n_pmm),
            wdob: frac(n_ppp + n_pmm + n_mmm),
        }
    }
}

/// All triangles of the graph as index triples into the edge list.
fn triangle_edge_indices(g: &SignedGraph) -> Vec<[u32; 3]> {
    let n = g.node_count();
    // Position of each edge in the edge list, addressable from both ends.
    let mut edge_index: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for (idx, &(u, v, _)) in g.edges().iter().enumerate() {
        edge_index[u as usize].push((v, idx as u32));
        edge_index[v as usize].push((u, idx as u32));
    }
    for list in &mut edge_index {
        list.sort_unstable();
    }
    let lookup = |u: u32, v: u32| -> Option<u32> {
        edge_index[u as usize]
            .binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| edge_index[u as usize][i].1)
    };
    let mut triangles = Vec::new();
    for (idx_uv, &(u, v, _)) in g.edges().iter().enumerate() {
        // Neighbor-intersection with w above both endpoints; every triangle
        // is found exactly once through its lowest edge.
        let (nu, nv) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (0usize, 0usize);
        while i < nu.len() && j < nv.len() {
            let (a, b) = (nu[i].0, nv[j].0);
            if a < b {
                i += 1;
            } else if b < a {
                j += 1;
            } else {
                if a > v {
                    let w = a;
                    let idx_uw = lookup(u, w).expect("neighbor edge exists");
                    let idx_vw = lookup(v, w).expect("neighbor edge exists");
                    triangles.push([idx_uv as u32, idx_uw, idx_vw]);
                }
                i += 1;
                j += 1;
            }
        }
    }
    triangles
}

fn count_motifs(triangles: &[[u32; 3]], signs: &[i8]) -> [u64; 4] {
    let mut counts = [0u64; 4];
    for t in triangles {
        let negatives = t
            .iter()
            .filter(|&&e| signs[e as usize] < 0)
            .count();
        counts[negatives] += 1;
    }
    counts
}

/// Exact triangle sign census by neighbor intersection.
pub fn triad_census(g: &SignedGraph) -> TriadCensus {
    let triangles = triangle_edge_indices(g);
    let signs: Vec<i8> = g.edges().iter().map(|e| e.2).collect();
    TriadCensus::from_counts(count_motifs(&triangles, &signs))
}

/// Motif z-scores under the sign-shuffle null model.
#[derive(Debug, Clone, Serialize)]
pub struct MotifZScores {
    pub z_ppp: Option<f64>,
    pub z_ppm: Option<f64>,
    pub z_pmm: Option<f64>,
    pub z_mmm: Option<f64>,
    pub null_mean: [f64; 4],
    pub null_std: [f64; 4],
    pub samples: usize,
    /// Motifs whose null distribution collapsed (zero standard deviation).
    pub degenerate: [bool; 4],
}

/// Z-scores of the four triad counts against a null model that keeps the
/// edges fixed and shuffles the multiset of signs over the edge positions.
/// Deterministic given `seed`.
pub fn sign_shuffle_zscores(g: &SignedGraph, samples: usize, seed: u64) -> Result<MotifZScores> {
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "sign-shuffle null needs at least 2 samples".into(),
        ));
    }
    let triangles = triangle_edge_indices(g);
    let signs: Vec<i8> = g.edges().iter().map(|e| e.2).collect();
    let observed = count_motifs(&triangles, &signs);
    let sample_counts: Vec<[u64; 4]> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream_rng(seed, &[stream::SIGN_SHUFFLE, i]);
            let mut shuffled = signs.clone();
            shuffled.shuffle(&mut rng);
            count_motifs(&triangles, &shuffled)
        })
        .collect();
    let mut mean = [0.0f64; 4];
    let mut var = [0.0f64; 4];
    for counts in &sample_counts {
        for m in 0..4 {
            mean[m] += counts[m] as f64;
        }
    }
    for m in &mut mean {
        *m /= samples as f64;
    }
    for counts in &sample_counts {
        for m in 0..4 {
            let d = counts[m] as f64 - mean[m];
            var[m] += d * d;
        }
    }
    let mut std = [0.0f64; 4];
    let mut degenerate = [false; 4];
    let mut z = [None; 4];
    for m in 0..4 {
        std[m] = (var[m] / samples as f64).sqrt();
        if std[m] > 0.0 {
            z[m] = Some((observed[m] as f64 - mean[m]) / std[m]);
        } else {
            degenerate[m] = true;
        }
    }
    Ok(MotifZScores {
        z_ppp: z[0],
        z_ppm: z[1],
        z_pmm: z[2],
        z_mmm: z[3],
        null_mean: mean,
        null_std: std,
        samples,
        degenerate,
    })
}

/// Degree-of-balance z-score against block-model null samples.
#[derive(Debug, Clone, Serialize)]
pub struct DobZScore {
    pub observed_dob: f64,
    pub z: Option<f64>,
    pub null_mean: f64,
    pub null_std: f64,
    pub samples_used: usize,
    /// Null samples discarded because they contained no triangles.
    pub skipped: usize,
    pub degenerate: bool,
}

/// Compares the observed degree of balance with networks resampled from a
/// block-model fit, which preserves the meso-scale block structure and edge
/// sign densities. Triangle-free samples are skipped and counted.
pub fn blockmodel_dob_zscore(
    g: &SignedGraph,
    fit: &BlockModelFit,
    samples: usize,
    seed: u64,
) -> Result<DobZScore> {
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "block-model null needs at least 2 samples".into(),
        ));
    }
    let observed = triad_census(g)
        .dob
        .ok_or_else(|| Error::Degenerate("observed graph has no triangles".into()))?;
    let dobs: Vec<Option<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let sample = sample_from_blockmodel(fit, rng::derive_seed(seed, &[i]));
            triad_census(&sample).dob
        })
        .collect();
    let used: Vec<f64> = dobs.iter().flatten().copied().collect();
    let skipped = samples - used.len();
    if used.is_empty() {
        return Err(Error::Degenerate(
            "all block-model samples were triangle-free".into(),
        ));
    }
    let mean = used.iter().sum::<f64>() / used.len() as f64;
    let var = used.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / used.len() as f64;
    let std = var.sqrt();
    Ok(DobZScore {
        observed_dob: observed,
        z: if std > 0.0 {
            Some((observed - mean) / std)
        } else {
            None
        },
        null_mean: mean,
        null_std: std,
        samples_used: used.len(),
        skipped,
        degenerate: std <= 0.0,
    })
}
