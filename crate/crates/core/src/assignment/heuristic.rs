//! Swap-based local search for balanced repulsive clustering.
//!
//! Start from a balanced random partition, then sweep over every pair of
//! clusters and every cross pair of members, exchanging the two UEs whenever
//! that strictly raises the total within-cluster repulsion. Stop after a
//! sweep with no accepted exchange. Exchanges are one-for-one, so cluster
//! sizes never change.

use super::random_assignment;
use super::repulsion::{PairwiseScores, RepulsionFunction};
use crate::chanest::PilotAssignment;
use crate::error::{Error, Result};

/// Minimum gain for an exchange to count as an improvement.
pub const SWAP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SwapOutcome {
    pub assignment: PilotAssignment,
    /// Objective tracked incrementally through the accepted swaps.
    pub score: f64,
    pub sweeps: usize,
    pub swaps: usize,
}

/// Change in objective from exchanging the clusters of `u` and `w`.
pub fn swap_gain<F: RepulsionFunction + ?Sized>(f: &F, labels: &[usize], u: usize, w: usize) -> f64 {
    gain_cached(&PairwiseScores::new(f), labels, u, w)
}

fn gain_cached(scores: &PairwiseScores, labels: &[usize], u: usize, w: usize) -> f64 {
    let (lu, lw) = (labels[u], labels[w]);
    if lu == lw {
        return 0.0;
    }
    let mut gain = 0.0;
    for (a, &la) in labels.iter().enumerate() {
        if la == lw && a != w {
            gain += scores.get(u, a) - scores.get(w, a);
        } else if la == lu && a != u {
            gain += scores.get(w, a) - scores.get(u, a);
        }
    }
    gain
}

/// Run the local search from a given initial partition.
pub fn repulsive_from<F: RepulsionFunction + ?Sized>(
    f: &F,
    initial: &PilotAssignment,
    num_pilots: usize,
) -> Result<SwapOutcome> {
    if initial.len() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} UEs", f.len()),
            actual: format!("{}", initial.len()),
        });
    }
    if initial.is_oracle() || !initial.is_balanced(num_pilots) {
        return Err(Error::ConstraintViolation(
            "initial partition must be balanced".into(),
        ));
    }
    let scores = PairwiseScores::new(f);
    let mut labels = initial.pilots().to_vec();
    let mut score = scores.score_of_labels(&labels);
    let mut sweeps = 0;
    let mut swaps = 0;

    loop {
        sweeps += 1;
        let mut improved = false;
        for c1 in 0..num_pilots {
            for c2 in (c1 + 1)..num_pilots {
                let mut first: Vec<usize> = (0..labels.len()).filter(|&k| labels[k] == c1).collect();
                let mut second: Vec<usize> =
                    (0..labels.len()).filter(|&k| labels[k] == c2).collect();
                #[allow(clippy::needless_range_loop)]
                for i in 0..first.len() {
                    for j in 0..second.len() {
                        let (u, w) = (first[i], second[j]);
                        let gain = gain_cached(&scores, &labels, u, w);
                        if gain > SWAP_TOLERANCE {
                            labels[u] = c2;
                            labels[w] = c1;
                            first[i] = w;
                            second[j] = u;
                            score += gain;
                            swaps += 1;
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }

    Ok(SwapOutcome {
        assignment: PilotAssignment::from_vec_unchecked(labels),
        score,
        sweeps,
        swaps,
    })
}

/// Repulsive clustering heuristic from a seeded balanced random start.
pub fn repulsive_heuristic<F: RepulsionFunction + ?Sized>(
    f: &F,
    num_pilots: usize,
    seed: u64,
) -> Result<PilotAssignment> {
    if f.len() < num_pilots {
        return Err(Error::InvalidInput(format!(
            "repulsive clustering needs K >= τp, got K = {} and τp = {num_pilots}",
            f.len()
        )));
    }
    let initial = random_assignment(f.len(), num_pilots, seed)?;
    Ok(repulsive_from(f, &initial, num_pilots)?.assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::Euclidean;

    #[test]
    fn line_example_reaches_twenty() {
        let f = Euclidean::from_scalars(&[0.0, 1.0, 10.0, 11.0]);
        let init = PilotAssignment::new(vec![0, 0, 1, 1], 2).unwrap();
        let out = repulsive_from(&f, &init, 2).unwrap();
        assert_eq!(out.score, 20.0);
        assert_eq!(out.swaps, 1);
        assert!(out.assignment.is_balanced(2));
    }

    #[test]
    fn one_ue_per_cluster_never_swaps() {
        let f = Euclidean::from_scalars(&[3.0, 1.0, 4.0]);
        let init = PilotAssignment::new(vec![2, 0, 1], 3).unwrap();
        let out = repulsive_from(&f, &init, 3).unwrap();
        assert_eq!((out.score, out.swaps, out.sweeps), (0.0, 0, 1));
        assert_eq!(out.assignment, init);
    }

    #[test]
    fn identical_points_stop_after_one_sweep() {
        let f = Euclidean::new(vec![vec![5.0, 5.0]; 6]);
        let init = PilotAssignment::new(vec![0, 1, 2, 0, 1, 2], 3).unwrap();
        let out = repulsive_from(&f, &init, 3).unwrap();
        assert_eq!((out.score, out.swaps, out.sweeps), (0.0, 0, 1));
    }

    #[test]
    fn rejects_unbalanced_start_and_small_k() {
        let f = Euclidean::from_scalars(&[0.0, 1.0, 2.0]);
        let init = PilotAssignment::new(vec![0, 0, 0], 2).unwrap();
        assert!(repulsive_from(&f, &init, 2).is_err());
        assert!(repulsive_heuristic(&f, 4, 0).is_err());
    }

    #[test]
    fn incremental_score_matches_full_recomputation() {
        let pts: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![(i as f64 * 37.3) % 101.0, (i as f64 * 11.7) % 53.0])
            .collect();
        let f = Euclidean::new(pts);
        let out = repulsive_from(&f, &random_assignment(20, 4, 3).unwrap(), 4).unwrap();
        let full = PairwiseScores::new(&f).score_of_labels(out.assignment.pilots());
        assert!((out.score - full).abs() < 1e-9);
    }
}
