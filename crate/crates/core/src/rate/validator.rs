//! Symbol-level Monte Carlo check of the closed-form SINR.
//!
//! Small-scale fading `h ~ CN(0, 1)` and pilot noise are drawn explicitly, the
//! MMSE estimates are formed from the projected received pilots, and the MR
//! combiner output is split into desired signal, beamforming uncertainty,
//! interference, and noise. Data symbols are unit power and independent, so
//! their contribution is taken in expectation.

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_eta, SinrTerms};
use crate::chanest::{estimation_quality, PilotAssignment};
use crate::error::Result;
use crate::topology::SimConfig;

/// Below this sample count the result is flagged as unreliable.
pub const MIN_VALIDATOR_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSinr {
    pub sinr: Vec<f64>,
    /// Closed-form SINR for the same inputs.
    pub closed_form: Vec<f64>,
    pub desired_power: Vec<f64>,
    pub beamforming_uncertainty: Vec<f64>,
    /// Total power received from other UEs after combining.
    pub interference: Vec<f64>,
    /// Coherent (mean) part of the interference; nonzero only for co-pilot UEs.
    pub copilot_coherent: Vec<f64>,
    pub noise: Vec<f64>,
    /// Set when fewer than [`MIN_VALIDATOR_SAMPLES`] samples were drawn.
    pub low_sample_warning: bool,
}

impl EmpiricalSinr {
    /// Largest relative deviation from the closed form across UEs.
    pub fn max_relative_error(&self) -> f64 {
        self.sinr
            .iter()
            .zip(&self.closed_form)
            .map(|(e, c)| ((e - c) / c).abs())
            .fold(0.0, f64::max)
    }
}

fn complex_normal(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * scale, im * scale)
}

/// Empirical uplink SINR for `beta` (`M × K`) under `assignment` and power
/// coefficients `eta`. Cost is `O(num_samples · M · K²)`.
pub fn validate_sinr_empirically(
    beta: &Array2<f64>,
    assignment: &PilotAssignment,
    cfg: &SimConfig,
    eta: &[f64],
    num_samples: usize,
    seed: u64,
) -> Result<EmpiricalSinr> {
    let (m_aps, k_ues) = beta.dim();
    check_eta(eta, k_ues)?;
    let rho_p = cfg.rho_p();
    let rho_u = cfg.rho_u();
    let quality = estimation_quality(beta, assignment, cfg.num_pilots, rho_p)?;
    let closed_form = SinrTerms::new(beta, &quality.gamma, assignment)?.sinr(eta, rho_u);
    let pilot_amp = (cfg.num_pilots as f64 * rho_p).sqrt();

    // UEs sharing a pilot see the same projected observation.
    let group: Vec<usize> = if assignment.is_oracle() {
        (0..k_ues).collect()
    } else {
        assignment.pilots().to_vec()
    };
    let num_groups = group.iter().max().map_or(0, |g| g + 1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean_z = Array2::<Complex64>::zeros((k_ues, k_ues));
    let mut mean_z2 = Array2::<f64>::zeros((k_ues, k_ues));
    let mut mean_est_energy = vec![0.0; k_ues];

    let mut g = Array2::<Complex64>::zeros((m_aps, k_ues));
    let mut g_hat = Array2::<Complex64>::zeros((m_aps, k_ues));
    let mut observation = vec![Complex64::new(0.0, 0.0); num_groups];
    let samples = num_samples.max(1);
    for _ in 0..samples {
        for m in 0..m_aps {
            for k in 0..k_ues {
                g[[m, k]] = complex_normal(&mut rng, 1.0) * beta[[m, k]].sqrt();
            }
            for obs in observation.iter_mut() {
                *obs = complex_normal(&mut rng, 1.0);
            }
            for k in 0..k_ues {
                observation[group[k]] += pilot_amp * g[[m, k]];
            }
            for k in 0..k_ues {
                g_hat[[m, k]] = quality.c[[m, k]] * observation[group[k]];
            }
        }
        for k in 0..k_ues {
            let mut energy = 0.0;
            for m in 0..m_aps {
                energy += g_hat[[m, k]].norm_sqr();
            }
            mean_est_energy[k] += energy;
            for j in 0..k_ues {
                let mut z = Complex64::new(0.0, 0.0);
                for m in 0..m_aps {
                    z += g[[m, j]] * g_hat[[m, k]].conj();
                }
                mean_z[[k, j]] += z;
                mean_z2[[k, j]] += z.norm_sqr();
            }
        }
    }
    let n = samples as f64;
    mean_z.mapv_inplace(|z| z / n);
    mean_z2.mapv_inplace(|z| z / n);
    mean_est_energy.iter_mut().for_each(|e| *e /= n);

    let mut out = EmpiricalSinr {
        sinr: vec![0.0; k_ues],
        closed_form,
        desired_power: vec![0.0; k_ues],
        beamforming_uncertainty: vec![0.0; k_ues],
        interference: vec![0.0; k_ues],
        copilot_coherent: vec![0.0; k_ues],
        noise: mean_est_energy,
        low_sample_warning: num_samples < MIN_VALIDATOR_SAMPLES,
    };
    for k in 0..k_ues {
        let coherent = mean_z[[k, k]].norm_sqr();
        out.desired_power[k] = rho_u * eta[k] * coherent;
        out.beamforming_uncertainty[k] = rho_u * eta[k] * (mean_z2[[k, k]] - coherent);
        for j in (0..k_ues).filter(|&j| j != k) {
            out.interference[k] += rho_u * eta[j] * mean_z2[[k, j]];
            out.copilot_coherent[k] += rho_u * eta[j] * mean_z[[k, j]].norm_sqr();
        }
        out.sinr[k] = out.desired_power[k]
            / (out.beamforming_uncertainty[k] + out.interference[k] + out.noise[k]);
    }
    Ok(out)
}
