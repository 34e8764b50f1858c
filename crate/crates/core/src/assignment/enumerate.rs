//! Exact enumerators: optimal balanced repulsive clustering and exhaustive
//! sum-rate search.
//!
//! Pilot labels are interchangeable, so both enumerators walk restricted
//! growth strings (first use of each label in increasing order). These come
//! out in lexicographic order and each is the lexicographically smallest
//! member of its relabeling class, so keeping the first strict maximum gives
//! the smallest-label argmax over all assignments.

use ndarray::Array2;

use super::repulsion::{PairwiseScores, RepulsionFunction};
use crate::chanest::PilotAssignment;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::topology::{NetworkRealization, SimConfig};

/// Largest K accepted by [`optimal_repulsive`].
pub const OPTIMAL_REPULSIVE_MAX_UES: usize = 12;
/// Largest τp^K accepted by [`exhaustive_sum_rate`].
pub const EXHAUSTIVE_BUDGET: u128 = 2_000_000;

fn visit_partitions(
    labels: &mut Vec<usize>,
    sizes: &mut Vec<usize>,
    n: usize,
    max_labels: usize,
    bounds: Option<(usize, usize)>,
    visit: &mut dyn FnMut(&[usize]),
) {
    let pos = labels.len();
    if pos == n {
        if let Some((lo, _)) = bounds {
            if sizes.len() < max_labels && lo > 0 || sizes.iter().any(|&s| s < lo) {
                return;
            }
        }
        visit(labels);
        return;
    }
    let used = sizes.len();
    for label in 0..(used + 1).min(max_labels) {
        if label == used {
            sizes.push(0);
        }
        sizes[label] += 1;
        let feasible = match bounds {
            None => true,
            Some((lo, cap)) => {
                let remaining = n - pos - 1;
                let missing: usize = sizes.iter().map(|&s| lo.saturating_sub(s)).sum::<usize>()
                    + (max_labels - sizes.len()) * lo;
                sizes[label] <= cap && missing <= remaining
            }
        };
        if feasible {
            labels.push(label);
            visit_partitions(labels, sizes, n, max_labels, bounds, visit);
            labels.pop();
        }
        sizes[label] -= 1;
        if label == used {
            sizes.pop();
        }
    }
}

fn size_bounds(n: usize, clusters: usize) -> (usize, usize) {
    let lo = n / clusters;
    let cap = if n.is_multiple_of(clusters) { lo } else { lo + 1 };
    (lo, cap)
}

/// All balanced partitions of `n` items into `clusters` labels, one per
/// relabeling class, in lexicographic order.
pub fn balanced_partitions(n: usize, clusters: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if clusters == 0 {
        return out;
    }
    visit_partitions(
        &mut Vec::with_capacity(n),
        &mut Vec::new(),
        n,
        clusters,
        Some(size_bounds(n, clusters)),
        &mut |l| out.push(l.to_vec()),
    );
    out
}

/// Exact maximizer of the within-cluster repulsion over balanced partitions.
pub fn optimal_repulsive<F: RepulsionFunction + ?Sized>(
    f: &F,
    num_pilots: usize,
) -> Result<PilotAssignment> {
    let n = f.len();
    if n > OPTIMAL_REPULSIVE_MAX_UES {
        return Err(Error::BudgetExceeded {
            guard: "optimal-repulsive K <= 12",
            detail: format!("K = {n}"),
        });
    }
    if n == 0 || num_pilots == 0 {
        return Err(Error::InvalidInput("need at least one UE and one pilot".into()));
    }
    let scores = PairwiseScores::new(f);
    let mut best: Option<(f64, Vec<usize>)> = None;
    visit_partitions(
        &mut Vec::with_capacity(n),
        &mut Vec::new(),
        n,
        num_pilots,
        Some(size_bounds(n, num_pilots)),
        &mut |labels| {
            let score = scores.score_of_labels(labels);
            if best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, labels.to_vec()));
            }
        },
    );
    let (_, labels) = best.expect("a balanced partition always exists");
    Ok(PilotAssignment::from_vec_unchecked(labels))
}

/// Precomputed pieces of the full-power sum rate for one realization.
struct SumRateEvaluator<'a> {
    beta: &'a Array2<f64>,
    /// Σ_k β_mk per AP.
    total_rx: Vec<f64>,
    snr: f64,
    amp: f64,
    rho_u: f64,
}

impl<'a> SumRateEvaluator<'a> {
    fn new(beta: &'a Array2<f64>, cfg: &SimConfig) -> Self {
        let snr = cfg.num_pilots as f64 * cfg.rho_p();
        SumRateEvaluator {
            beta,
            total_rx: beta.rows().into_iter().map(|r| r.sum()).collect(),
            snr,
            amp: snr.sqrt(),
            rho_u: cfg.rho_u(),
        }
    }

    fn eval(&self, labels: &[usize]) -> f64 {
        let (m_aps, k_ues) = self.beta.dim();
        let span = labels.iter().max().map_or(0, |l| l + 1);
        let mut per_pilot = vec![0.0; m_aps * span];
        for (k, &l) in labels.iter().enumerate() {
            for m in 0..m_aps {
                per_pilot[m * span + l] += self.beta[[m, k]];
            }
        }
        let mut c = vec![0.0; m_aps];
        let mut total = 0.0;
        for k in 0..k_ues {
            let (mut sum_gamma, mut bu) = (0.0, 0.0);
            for m in 0..m_aps {
                let b = self.beta[[m, k]];
                c[m] = self.amp * b / (self.snr * per_pilot[m * span + labels[k]] + 1.0);
                let gamma = self.amp * b * c[m];
                sum_gamma += gamma;
                bu += gamma * self.total_rx[m];
            }
            // γ_mk β_mj / β_mk = √(τp ρp) c_mk β_mj
            let mut copilot = 0.0;
            for j in (0..k_ues).filter(|&j| j != k && labels[j] == labels[k]) {
                let coherent: f64 = (0..m_aps).map(|m| c[m] * self.beta[[m, j]]).sum::<f64>() * self.amp;
                copilot += coherent * coherent;
            }
            let sinr =
                self.rho_u * sum_gamma * sum_gamma / (self.rho_u * (copilot + bu) + sum_gamma);
            total += (1.0 + sinr).log2();
        }
        total
    }
}

/// Sum of full-power spectral efficiencies for a label vector.
pub fn full_power_sum_rate(beta: &Array2<f64>, labels: &[usize], cfg: &SimConfig) -> f64 {
    SumRateEvaluator::new(beta, cfg).eval(labels)
}

pub fn exhaustive_sum_rate(realization: &NetworkRealization, cfg: &SimConfig) -> Result<PilotAssignment> {
    exhaustive_sum_rate_with(realization, cfg, Execution::default())
}

/// Exact maximizer of the full-power sum rate over every (not necessarily
/// balanced) assignment of `τp` pilots.
pub fn exhaustive_sum_rate_with(
    realization: &NetworkRealization,
    cfg: &SimConfig,
    exec: Execution,
) -> Result<PilotAssignment> {
    let k_ues = realization.num_ues();
    let size = (cfg.num_pilots as u128).checked_pow(k_ues as u32);
    if size.is_none_or(|s| s > EXHAUSTIVE_BUDGET) {
        return Err(Error::BudgetExceeded {
            guard: "exhaustive τp^K <= 2e6",
            detail: format!("τp = {}, K = {k_ues}", cfg.num_pilots),
        });
    }
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    visit_partitions(
        &mut Vec::with_capacity(k_ues),
        &mut Vec::new(),
        k_ues,
        cfg.num_pilots,
        None,
        &mut |l| candidates.push(l.to_vec()),
    );
    let evaluator = SumRateEvaluator::new(&realization.beta, cfg);
    let values = exec.map_slice(&candidates, |labels| evaluator.eval(labels));
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    Ok(PilotAssignment::from_vec_unchecked(candidates.swap_remove(best)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::Euclidean;
    use crate::chanest::estimation_quality;
    use crate::rate::sum_rate;
    use crate::topology::generate_realization;

    #[test]
    fn balanced_partition_counts() {
        // 4 items into 2 pairs: 3; 6 into 3 pairs: 15; 12 into 3 quads: 5775
        assert_eq!(balanced_partitions(4, 2).len(), 3);
        assert_eq!(balanced_partitions(6, 3).len(), 15);
        assert_eq!(balanced_partitions(12, 3).len(), 5775);
        // 5 into 2: sizes {3,2}: C(5,2) = 10
        assert_eq!(balanced_partitions(5, 2).len(), 10);
        assert_eq!(balanced_partitions(3, 4), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn optimal_line_examples() {
        let f = Euclidean::from_scalars(&[0.0, 1.0, 10.0, 11.0]);
        let p = optimal_repulsive(&f, 2).unwrap();
        assert_eq!(PairwiseScores::new(&f).score_of_labels(p.pilots()), 20.0);
        let f = Euclidean::from_scalars(&[0.0, 1.0, 2.0]);
        assert_eq!(optimal_repulsive(&f, 3).unwrap().pilots(), &[0, 1, 2]);
    }

    #[test]
    fn optimal_guard() {
        let f = Euclidean::from_scalars(&[0.0; 13]);
        assert!(matches!(
            optimal_repulsive(&f, 2),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn fast_sum_rate_matches_generic_path() {
        let cfg = SimConfig {
            num_aps: 15,
            num_ues: 6,
            num_pilots: 3,
            seed: 3,
            ..SimConfig::default()
        };
        let r = generate_realization(&cfg, 1);
        for labels in [vec![0, 1, 2, 0, 1, 2], vec![0, 0, 0, 1, 1, 2], vec![2, 2, 2, 2, 2, 2]] {
            let p = PilotAssignment::new(labels.clone(), 3).unwrap();
            let q = estimation_quality(&r.beta, &p, 3, cfg.rho_p()).unwrap();
            let generic = sum_rate(&r.beta, &q.gamma, &p, &[1.0; 6], cfg.rho_u()).unwrap();
            let fast = full_power_sum_rate(&r.beta, &labels, &cfg);
            assert!((generic - fast).abs() < 1e-10 * generic, "{generic} vs {fast}");
        }
    }

    #[test]
    fn exhaustive_two_ues_pick_distinct_pilots() {
        let cfg = SimConfig {
            num_aps: 10,
            num_ues: 2,
            num_pilots: 2,
            ..SimConfig::default()
        };
        for i in 0..5 {
            let r = generate_realization(&cfg, i);
            let p = exhaustive_sum_rate(&r, &cfg).unwrap();
            assert_eq!(p.pilots(), &[0, 1]);
        }
    }

    #[test]
    fn exhaustive_guard() {
        let cfg = SimConfig {
            num_aps: 2,
            num_ues: 22,
            num_pilots: 2,
            ..SimConfig::default()
        };
        let r = generate_realization(&cfg, 0);
        assert!(matches!(
            exhaustive_sum_rate(&r, &cfg),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
