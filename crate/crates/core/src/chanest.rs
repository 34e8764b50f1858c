//! MMSE channel estimation statistics for a pilot assignment.
//!
//! Pilot books are orthonormal, so the only thing that matters about two
//! pilots is whether they are the same one. Sequences are never built.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Pilot index per UE. In oracle mode every cross-correlation is zero, as
/// if each UE had a private orthogonal pilot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PilotAssignment {
    pilots: Vec<usize>,
    oracle: bool,
}

impl PilotAssignment {
    /// Checked constructor: every entry must be below `num_pilots`.
    pub fn new(pilots: Vec<usize>, num_pilots: usize) -> Result<Self> {
        if let Some(&bad) = pilots.iter().find(|&&p| p >= num_pilots) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: num_pilots,
            });
        }
        Ok(PilotAssignment {
            pilots,
            oracle: false,
        })
    }

    pub(crate) fn from_vec_unchecked(pilots: Vec<usize>) -> Self {
        PilotAssignment {
            pilots,
            oracle: false,
        }
    }

    /// Contamination-free assignment for `num_ues` UEs.
    pub fn oracle(num_ues: usize) -> Self {
        PilotAssignment {
            pilots: (0..num_ues).collect(),
            oracle: true,
        }
    }

    pub fn pilots(&self) -> &[usize] {
        &self.pilots
    }

    pub fn is_oracle(&self) -> bool {
        self.oracle
    }

    pub fn len(&self) -> usize {
        self.pilots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pilots.is_empty()
    }

    /// `|φ_k^H φ_k2|`, which is 0 or 1 for an orthonormal book.
    pub fn correlation(&self, k: usize, k2: usize) -> Result<u8> {
        let len = self.pilots.len();
        for index in [k, k2] {
            if index >= len {
                return Err(Error::IndexOutOfRange { index, len });
            }
        }
        Ok(self.shares_pilot(k, k2) as u8)
    }

    #[inline]
    pub(crate) fn shares_pilot(&self, k: usize, k2: usize) -> bool {
        k == k2 || (!self.oracle && self.pilots[k] == self.pilots[k2])
    }

    /// Number of UEs on each of `num_pilots` pilots.
    pub fn pilot_counts(&self, num_pilots: usize) -> Vec<usize> {
        let mut counts = vec![0; num_pilots];
        for &p in &self.pilots {
            if p < num_pilots {
                counts[p] += 1;
            }
        }
        counts
    }

    /// True when every pilot is used ⌊K/τp⌋ or ⌊K/τp⌋+1 times.
    pub fn is_balanced(&self, num_pilots: usize) -> bool {
        if self.pilots.iter().any(|&p| p >= num_pilots) {
            return false;
        }
        let lo = self.pilots.len() / num_pilots;
        self.pilot_counts(num_pilots)
            .iter()
            .all(|&c| c >= lo && c <= lo + 1)
    }
}

/// MMSE scaling coefficients `c` and estimate mean-squares `γ`, both `M × K`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationQuality {
    pub gamma: Array2<f64>,
    pub c: Array2<f64>,
}

/// Estimation statistics for `beta` (`M × K`) under `assignment`.
///
/// `c_mk = √(τp ρp) β_mk / (τp ρp Σ_{k'} β_mk' |φ_k^H φ_k'|² + 1)` and
/// `γ_mk = √(τp ρp) β_mk c_mk`.
pub fn estimation_quality(
    beta: &Array2<f64>,
    assignment: &PilotAssignment,
    num_pilots: usize,
    rho_p: f64,
) -> Result<EstimationQuality> {
    let (m_aps, k_ues) = beta.dim();
    if assignment.len() != k_ues {
        return Err(Error::DimensionMismatch {
            expected: format!("{k_ues} pilot entries"),
            actual: format!("{}", assignment.len()),
        });
    }
    if !(rho_p > 0.0) {
        return Err(Error::InvalidInput(format!("rho_p must be positive, got {rho_p}")));
    }
    let snr = num_pilots as f64 * rho_p;
    let amp = snr.sqrt();

    // received pilot power per (AP, pilot) excluding noise
    let denom = if assignment.is_oracle() {
        beta.mapv(|b| snr * b + 1.0)
    } else {
        let span = assignment.pilots().iter().max().map_or(0, |&p| p + 1);
        let mut per_pilot = Array2::<f64>::zeros((m_aps, span));
        for (k, &p) in assignment.pilots().iter().enumerate() {
            for m in 0..m_aps {
                per_pilot[[m, p]] += beta[[m, k]];
            }
        }
        Array2::from_shape_fn((m_aps, k_ues), |(m, k)| {
            snr * per_pilot[[m, assignment.pilots()[k]]] + 1.0
        })
    };

    let c = Array2::from_shape_fn((m_aps, k_ues), |(m, k)| amp * beta[[m, k]] / denom[[m, k]]);
    let gamma = Array2::from_shape_fn((m_aps, k_ues), |(m, k)| amp * beta[[m, k]] * c[[m, k]]);
    Ok(EstimationQuality { gamma, c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn correlation_examples() {
        let p = PilotAssignment::new(vec![0, 0, 1], 2).unwrap();
        assert_eq!(p.correlation(0, 1).unwrap(), 1);
        assert_eq!(p.correlation(0, 2).unwrap(), 0);
        assert_eq!(p.correlation(2, 2).unwrap(), 1);
        assert!(matches!(
            p.correlation(0, 3),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        ));

        let oracle = PilotAssignment::oracle(3);
        assert_eq!(oracle.correlation(0, 1).unwrap(), 0);
        assert_eq!(oracle.correlation(1, 1).unwrap(), 1);
    }

    #[test]
    fn out_of_range_pilot_rejected() {
        assert!(PilotAssignment::new(vec![0, 2], 2).is_err());
    }

    #[test]
    fn single_ue_hand_values() {
        // τp ρp = 1
        let q = estimation_quality(&array![[1.0]], &PilotAssignment::new(vec![0], 1).unwrap(), 1, 1.0)
            .unwrap();
        assert!((q.c[[0, 0]] - 0.5).abs() < 1e-15);
        assert!((q.gamma[[0, 0]] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn copilot_pair_hand_values() {
        let p = PilotAssignment::new(vec![0, 0], 1).unwrap();
        let q = estimation_quality(&array![[1.0, 1.0]], &p, 1, 1.0).unwrap();
        for k in 0..2 {
            assert!((q.gamma[[0, k]] - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn vanishing_gain_gives_vanishing_estimate() {
        let p = PilotAssignment::new(vec![0, 1], 2).unwrap();
        let q = estimation_quality(&array![[1e-30, 1.0]], &p, 2, 1e3).unwrap();
        assert!(q.gamma[[0, 0]] < 1e-55);
    }

    #[test]
    fn dimension_mismatch() {
        let p = PilotAssignment::new(vec![0], 1).unwrap();
        assert!(matches!(
            estimation_quality(&array![[1.0, 1.0]], &p, 1, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn balance_check() {
        assert!(PilotAssignment::new(vec![0, 1, 0], 2).unwrap().is_balanced(2));
        assert!(!PilotAssignment::new(vec![0, 0, 0], 2).unwrap().is_balanced(2));
    }
}
