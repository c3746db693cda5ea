use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::partition::Partition;
use crate::rng::{self, stream};

const KMEANS_RESTARTS: usize = 50;
const KMEANS_MAX_ITERS: usize = 200;

/// Spectral partitioning on the signed Laplacian `L = D - A`, where `D` is
/// the diagonal of unsigned degrees and `A` the +-1 adjacency matrix.
///
/// Embeds nodes with the eigenvectors of the `k` smallest eigenvalues and
/// clusters the rows with seeded k-means (k-means++ initialization, 50
/// restarts). Dense eigensolve; intended for graphs up to a few thousand
/// nodes.
pub fn spectral_signed(g: &SignedGraph, k: usize, seed: u64) -> Result<Partition> {
    let n = g.node_count();
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds node count {n}"
        )));
    }
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for &(u, v, s) in g.edges() {
        let (u, v) = (u as usize, v as usize);
        lap[(u, v)] -= s as f64;
        lap[(v, u)] -= s as f64;
        lap[(u, u)] += 1.0;
        lap[(v, v)] += 1.0;
    }
    let eigen = SymmetricEigen::new(lap);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .partial_cmp(&eigen.eigenvalues[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut points = vec![vec![0.0; k]; n];
    for (dim, &col) in order.iter().take(k).enumerate() {
        let v = eigen.eigenvectors.column(col);
        // Fix the sign freedom of each eigenvector so embeddings do not
        // depend on solver internals: first nonzero coordinate positive.
        let flip = v
            .iter()
            .find(|x| x.abs() > 1e-12)
            .map_or(1.0, |x| if *x < 0.0 { -1.0 } else { 1.0 });
        for i in 0..n {
            points[i][dim] = v[i] * flip;
        }
    }
    let labels = kmeans(&points, k, seed);
    Ok(Partition::from_labels(&labels))
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Seeded k-means with k-means++ initialization; returns the best of
/// `KMEANS_RESTARTS` runs by within-cluster sum of squares.
fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<u32> {
    let mut best: Option<(f64, Vec<u32>)> = None;
    for restart in 0..KMEANS_RESTARTS as u64 {
        let mut rng = rng::stream_rng(seed, &[stream::SPECTRAL, restart]);
        let (labels, cost) = kmeans_once(points, k, &mut rng);
        match &best {
            Some((bc, _)) if cost >= bc - 1e-15 => {}
            _ => best = Some((cost, labels)),
        }
    }
    best.expect("at least one restart").1
}

fn kmeans_once(
    points: &[Vec<f64>],
    k: usize,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> (Vec<u32>, f64) {
    let n = points.len();
    let dim = points[0].len();
    // k-means++ seeding
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..n)].clone());
    let mut dist2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = dist2.iter().sum();
        let next = if total <= 0.0 {
            rng.random_range(0..n)
        } else {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in dist2.iter().enumerate() {
                target -= d;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centroids.push(points[next].clone());
        for (i, p) in points.iter().enumerate() {
            dist2[i] = dist2[i].min(squared_distance(p, centroids.last().unwrap()));
        }
    }

    let mut labels = vec![0u32; n];
    for _ in 0..KMEANS_MAX_ITERS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best_c = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = squared_distance(p, centroid);
                if d < best_d - 1e-15 {
                    best_d = d;
                    best_c = c;
                }
            }
            if labels[i] != best_c as u32 {
                labels[i] = best_c as u32;
                changed = true;
            }
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            let c = labels[i] as usize;
            counts[c] += 1;
            for (d, x) in p.iter().enumerate() {
                sums[c][d] += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for d in 0..dim {
                    centroids[c][d] = sums[c][d] / counts[c] as f64;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let cost = points
        .iter()
        .zip(&labels)
        .map(|(p, &c)| squared_distance(p, &centroids[c as usize]))
        .sum();
    (labels, cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::nmi;
    use crate::testutil::{g2x3, g2x3_partition};

    #[test]
    fn recovers_g2x3_with_k2() {
        let p = spectral_signed(&g2x3(), 2, 7).unwrap();
        assert!(p.same_set_partition(&g2x3_partition()));
    }

    #[test]
    fn rejects_bad_k() {
        let g = g2x3();
        assert!(spectral_signed(&g, 1, 0).is_err());
        assert!(spectral_signed(&g, 7, 0).is_err());
    }

    #[test]
    fn invariant_under_node_reordering() {
        // A planted two-group graph with a generic spectrum.
        let (g, truth) = crate::synth::generate_planted(&crate::synth::PlantedParams {
            n: 24,
            groups: 2,
            p_pos_in: 0.7,
            p_neg_in: 0.0,
            p_pos_out: 0.05,
            p_neg_out: 0.6,
            seed: 5,
        })
        .unwrap();
        let p1 = spectral_signed(&g, 2, 11).unwrap();
        // Reverse the node order.
        let n = g.node_count() as u32;
        let remap = |x: u32| n - 1 - x;
        let edges: Vec<(u32, u32, i8)> = g
            .edges()
            .iter()
            .map(|&(u, v, s)| (remap(u), remap(v), s))
            .collect();
        let g2 = SignedGraph::from_edges(n as usize, &edges).unwrap();
        let p2 = spectral_signed(&g2, 2, 11).unwrap();
        let back: Vec<u32> = (0..n).map(|i| p2.block_of(remap(i))).collect();
        assert!(Partition::from_labels(&back).same_set_partition(&p1));
        assert!((nmi(&p1, &truth).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn planted_recovery_median_nmi() {
        // Easy regime: positive assortative groups, sparse noise between.
        let mut scores = Vec::new();
        for seed in 0..20u64 {
            let (g, truth) = crate::synth::generate_planted(&crate::synth::PlantedParams {
                n: 180,
                groups: 3,
                p_pos_in: 0.2,
                p_neg_in: 0.0,
                p_pos_out: 0.01,
                p_neg_out: 0.01,
                seed,
            })
            .unwrap();
            let p = spectral_signed(&g, 3, seed).unwrap();
            scores.push(nmi(&p, &truth).unwrap());
        }
        scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = scores[scores.len() / 2];
        assert!(median >= 0.95, "median NMI {median}");
    }
}
