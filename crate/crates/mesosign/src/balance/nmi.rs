use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Normalized mutual information of two partitions of the same node set:
/// `2 I(p;u) / (H(p) + H(u))`, in `[0,1]` with 1 meaning identical set
/// partitions. When both entropies are zero the partitions are single blocks,
/// which are identical, so the result is 1.
pub fn nmi(p: &Partition, u: &Partition) -> Result<f64> {
    if p.node_count() != u.node_count() {
        return Err(Error::SizeMismatch {
            partition_nodes: p.node_count(),
            graph_nodes: u.node_count(),
        });
    }
    let n = p.node_count();
    if n == 0 {
        return Err(Error::Degenerate("NMI of empty partitions".into()));
    }
    if p.same_set_partition(u) {
        return Ok(1.0);
    }
    let n_f = n as f64;
    // BTreeMap keeps the summation order fixed, so results are bit-stable.
    let mut joint: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (&a, &b) in p.assignment().iter().zip(u.assignment()) {
        *joint.entry((a, b)).or_insert(0) += 1;
    }
    let entropy = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let q = c as f64 / n_f;
                -q * q.ln()
            })
            .sum()
    };
    let h_p = entropy(p.block_sizes());
    let h_u = entropy(u.block_sizes());
    if h_p == 0.0 && h_u == 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (&(a, b), &count) in &joint {
        let p_ab = count as f64 / n_f;
        let p_a = p.block_sizes()[a as usize] as f64 / n_f;
        let p_b = u.block_sizes()[b as usize] as f64 / n_f;
        mi += p_ab * (p_ab / (p_a * p_b)).ln();
    }
    Ok((2.0 * mi / (h_p + h_u)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_partitions_score_one() {
        let p = Partition::from_labels(&[0, 1, 1, 2, 0]);
        assert_eq!(nmi(&p, &p).unwrap(), 1.0);
    }

    #[test]
    fn refinement_example() {
        let u = Partition::from_labels(&[0, 0, 1, 1]);
        let p = Partition::from_labels(&[0, 1, 2, 3]);
        let expected = 2.0 * 2f64.ln() / (2f64.ln() + 4f64.ln());
        assert!((nmi(&p, &u).unwrap() - expected).abs() < 1e-12);
        assert!((nmi(&p, &u).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_block_vs_split_scores_zero() {
        let p = Partition::single_block(4);
        let u = Partition::from_labels(&[0, 0, 1, 1]);
        assert_eq!(nmi(&p, &u).unwrap(), 0.0);
    }

    #[test]
    fn both_single_blocks_score_one() {
        let p = Partition::single_block(5);
        let u = Partition::single_block(5);
        assert_eq!(nmi(&p, &u).unwrap(), 1.0);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let p = Partition::single_block(4);
        let u = Partition::single_block(5);
        assert!(nmi(&p, &u).is_err());
    }

    fn arb_partition_pair() -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
        (2usize..12).prop_flat_map(|n| {
            (
                proptest::collection::vec(0u32..4, n),
                proptest::collection::vec(0u32..4, n),
            )
        })
    }

    proptest! {
        #[test]
        fn nmi_symmetric_bounded_and_label_invariant((a, b) in arb_partition_pair()) {
            let p = Partition::from_labels(&a);
            let u = Partition::from_labels(&b);
            let forward = nmi(&p, &u).unwrap();
            let backward = nmi(&u, &p).unwrap();
            prop_assert!((forward - backward).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&forward));
            // Relabel p by an arbitrary permutation of block ids.
            let relabeled: Vec<u32> = a.iter().map(|&x| 7 - x).collect();
            let pr = Partition::from_labels(&relabeled);
            prop_assert!((nmi(&pr, &u).unwrap() - forward).abs() < 1e-12);
            // NMI reaches 1 exactly on identical set partitions.
            let identical = p.same_set_partition(&u);
            prop_assert_eq!(forward > 1.0 - 1e-12, identical);
        }
    }
}
