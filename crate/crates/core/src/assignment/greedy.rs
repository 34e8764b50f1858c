//! Iterative min-rate greedy pilot assignment.

use super::random_assignment;
use crate::chanest::{estimation_quality, PilotAssignment};
use crate::error::Result;
use crate::rate::SinrTerms;
use crate::topology::{NetworkRealization, SimConfig};

/// Number of min-rate updates used when none is configured.
pub fn default_greedy_iterations(num_ues: usize) -> usize {
    2 * num_ues
}

/// Start from a balanced random partition, then repeatedly move the UE with
/// the lowest full-power rate to the pilot whose other users have the least
/// total large-scale gain, summed over all APs.
///
/// The moved UE keeps its pilot when that pilot is already among the least
/// contaminated ones; otherwise the lowest-index minimizer wins.
pub fn greedy_assignment(
    realization: &NetworkRealization,
    cfg: &SimConfig,
    seed: u64,
    iterations: usize,
) -> Result<PilotAssignment> {
    let beta = &realization.beta;
    let k_ues = beta.ncols();
    let num_pilots = cfg.num_pilots;
    let mut pilots = random_assignment(k_ues, num_pilots, seed)?.pilots().to_vec();
    let total_gain: Vec<f64> = (0..k_ues).map(|k| beta.column(k).sum()).collect();
    let full = vec![1.0; k_ues];
    let (rho_p, rho_u) = (cfg.rho_p(), cfg.rho_u());

    for _ in 0..iterations {
        let current = PilotAssignment::from_vec_unchecked(pilots.clone());
        let quality = estimation_quality(beta, &current, num_pilots, rho_p)?;
        let sinr = SinrTerms::new(beta, &quality.gamma, &current)?.sinr(&full, rho_u);
        let worst = sinr
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .expect("at least one UE");

        let mut load = vec![0.0; num_pilots];
        for (k, &p) in pilots.iter().enumerate() {
            if k != worst {
                load[p] += total_gain[k];
            }
        }
        let best = load.iter().copied().fold(f64::INFINITY, f64::min);
        if load[pilots[worst]] > best {
            pilots[worst] = load.iter().position(|&l| l == best).expect("minimum exists");
        }
    }
    Ok(PilotAssignment::from_vec_unchecked(pilots))
}
