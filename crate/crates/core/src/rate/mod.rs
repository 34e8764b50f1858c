//! Closed-form uplink SINR with MR combining, throughput, and sum rate.

mod validator;

pub use validator::{validate_sinr_empirically, EmpiricalSinr, MIN_VALIDATOR_SAMPLES};

use ndarray::Array2;

use crate::chanest::PilotAssignment;
use crate::error::{Error, Result};
use crate::topology::SimConfig;

/// Power-independent coefficients of the uplink SINR.
///
/// For UE `k`:
///
/// ```text
/// SINR_k = ρu ηk S_k / (ρu Σ_{k'≠k} ηk' CP_kk' + ρu Σ_{k'} ηk' BU_kk' + N_k)
/// ```
///
/// so once these are built, evaluating any power vector costs `O(K²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrTerms {
    /// `(Σ_m γ_mk)²`.
    pub signal: Vec<f64>,
    /// `(Σ_m γ_mk β_mk'/β_mk)²` for co-pilot `k' ≠ k`, zero otherwise.
    pub copilot: Array2<f64>,
    /// `Σ_m γ_mk β_mk'`.
    pub beamforming: Array2<f64>,
    /// `Σ_m γ_mk`.
    pub noise: Vec<f64>,
}

impl SinrTerms {
    pub fn new(
        beta: &Array2<f64>,
        gamma: &Array2<f64>,
        assignment: &PilotAssignment,
    ) -> Result<Self> {
        check_dims(beta, gamma, assignment)?;
        let (m_aps, k_ues) = beta.dim();

        let noise: Vec<f64> = (0..k_ues).map(|k| gamma.column(k).sum()).collect();
        let signal = noise.iter().map(|s| s * s).collect();

        let mut copilot = Array2::zeros((k_ues, k_ues));
        let mut beamforming = Array2::zeros((k_ues, k_ues));
        for k in 0..k_ues {
            for j in 0..k_ues {
                let mut bu = 0.0;
                for m in 0..m_aps {
                    bu += gamma[[m, k]] * beta[[m, j]];
                }
                beamforming[[k, j]] = bu;
                if j != k && assignment.shares_pilot(k, j) {
                    let mut coherent = 0.0;
                    for m in 0..m_aps {
                        coherent += gamma[[m, k]] * beta[[m, j]] / beta[[m, k]];
                    }
                    copilot[[k, j]] = coherent * coherent;
                }
            }
        }
        Ok(SinrTerms {
            signal,
            copilot,
            beamforming,
            noise,
        })
    }

    pub fn num_ues(&self) -> usize {
        self.signal.len()
    }

    /// Denominator of `SINR_k` at power vector `eta`.
    pub fn interference(&self, k: usize, eta: &[f64], rho_u: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &e) in eta.iter().enumerate() {
            acc += e * (self.copilot[[k, j]] + self.beamforming[[k, j]]);
        }
        rho_u * acc + self.noise[k]
    }

    pub fn sinr_of(&self, k: usize, eta: &[f64], rho_u: f64) -> f64 {
        rho_u * eta[k] * self.signal[k] / self.interference(k, eta, rho_u)
    }

    /// SINR of every UE; `eta` is not range-checked here.
    pub fn sinr(&self, eta: &[f64], rho_u: f64) -> Vec<f64> {
        (0..self.num_ues()).map(|k| self.sinr_of(k, eta, rho_u)).collect()
    }
}

fn check_dims(beta: &Array2<f64>, gamma: &Array2<f64>, assignment: &PilotAssignment) -> Result<()> {
    if beta.dim() != gamma.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("gamma of shape {:?}", beta.dim()),
            actual: format!("{:?}", gamma.dim()),
        });
    }
    if assignment.len() != beta.ncols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} pilot entries", beta.ncols()),
            actual: format!("{}", assignment.len()),
        });
    }
    Ok(())
}

pub(crate) fn check_eta(eta: &[f64], k_ues: usize) -> Result<()> {
    if eta.len() != k_ues {
        return Err(Error::DimensionMismatch {
            expected: format!("{k_ues} power coefficients"),
            actual: format!("{}", eta.len()),
        });
    }
    if let Some(bad) = eta.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::InvalidInput(format!(
            "power coefficient {bad} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Per-UE uplink SINR (linear).
pub fn uplink_sinr(
    beta: &Array2<f64>,
    gamma: &Array2<f64>,
    assignment: &PilotAssignment,
    eta: &[f64],
    rho_u: f64,
) -> Result<Vec<f64>> {
    check_eta(eta, beta.ncols())?;
    Ok(SinrTerms::new(beta, gamma, assignment)?.sinr(eta, rho_u))
}

/// Per-user throughput in bits/s: `B (1 - τp/τc)/2 · log2(1 + sinr)`.
pub fn throughput(sinr: f64, cfg: &SimConfig) -> f64 {
    cfg.bandwidth * cfg.prelog() * (1.0 + sinr).log2()
}

/// Sum of per-UE spectral efficiencies in bits/s/Hz.
pub fn sum_rate(
    beta: &Array2<f64>,
    gamma: &Array2<f64>,
    assignment: &PilotAssignment,
    eta: &[f64],
    rho_u: f64,
) -> Result<f64> {
    Ok(uplink_sinr(beta, gamma, assignment, eta, rho_u)?
        .iter()
        .map(|s| (1.0 + s).log2())
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub sinr: Vec<f64>,
    /// bits/s/Hz
    pub rate: Vec<f64>,
    /// bits/s
    pub throughput: Vec<f64>,
}

impl RateReport {
    pub fn new(sinr: Vec<f64>, cfg: &SimConfig) -> Self {
        let rate = sinr.iter().map(|s| (1.0 + s).log2()).collect();
        let throughput = sinr.iter().map(|&s| throughput(s, cfg)).collect();
        RateReport {
            sinr,
            rate,
            throughput,
        }
    }

    pub fn min_rate(&self) -> f64 {
        self.rate.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
