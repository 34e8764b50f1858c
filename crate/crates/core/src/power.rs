//! Uplink power control: full power and max-min fairness.
//!
//! Max-min runs a geometric bisection on the common SINR target `t`. A target
//! is feasible when the iteration
//!
//! ```text
//! η_k ← t · I_k(η) / (ρu S_k)
//! ```
//!
//! started from `η = 0` settles with every `η_k ≤ 1`. `I_k` is affine and
//! increasing in `η`, so the iterates grow monotonically towards the minimal
//! power vector meeting the target, and overshooting 1 proves infeasibility.
//! When the iteration is still moving after its budget (strongly coupled UEs
//! push its contraction factor towards 1) the limit is computed directly by
//! solving the affine fixed-point equation.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;

use crate::chanest::PilotAssignment;
use crate::error::{Error, Result};
use crate::rate::SinrTerms;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCoefficients {
    pub eta: Vec<f64>,
}

impl PowerCoefficients {
    pub fn as_slice(&self) -> &[f64] {
        &self.eta
    }
}

pub fn full_power(num_ues: usize) -> PowerCoefficients {
    PowerCoefficients {
        eta: vec![1.0; num_ues],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxMinOptions {
    /// Stop when the bisection bracket `hi / lo` is within `1 + tol`.
    pub target_tol: f64,
    /// ∞-norm change in η that counts as converged.
    pub fixed_point_tol: f64,
    pub fixed_point_budget: usize,
    pub bisection_budget: usize,
}

impl Default for MaxMinOptions {
    fn default() -> Self {
        MaxMinOptions {
            target_tol: 1e-3,
            fixed_point_tol: 1e-9,
            fixed_point_budget: 500,
            bisection_budget: 60,
        }
    }
}

/// Slack allowed on `η ≤ 1` when judging a fixed point feasible.
const SATURATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxMinSolution {
    pub power: PowerCoefficients,
    /// Largest SINR target proven feasible.
    pub target: f64,
    pub bisection_steps: usize,
}

#[derive(Debug, PartialEq)]
enum Feasibility {
    Feasible(Vec<f64>),
    Infeasible,
}

/// Solves `(I - t·diag(1/S)·(CP + BU)) η = t·N / (ρu S)`. A nonnegative
/// solution with a positive right-hand side also certifies that the
/// iteration is a contraction.
fn solve_fixed_point(terms: &SinrTerms, rho_u: f64, target: f64) -> Feasibility {
    let k_ues = terms.num_ues();
    let system = DMatrix::from_fn(k_ues, k_ues, |k, j| {
        let coupling = target * (terms.copilot[[k, j]] + terms.beamforming[[k, j]]) / terms.signal[k];
        if k == j {
            1.0 - coupling
        } else {
            -coupling
        }
    });
    let rhs = DVector::from_fn(k_ues, |k, _| target * terms.noise[k] / (rho_u * terms.signal[k]));
    match system.lu().solve(&rhs) {
        Some(eta) if eta.iter().all(|e| (0.0..=1.0 + SATURATION_SLACK).contains(e)) => {
            Feasibility::Feasible(eta.iter().map(|e| e.min(1.0)).collect())
        }
        _ => Feasibility::Infeasible,
    }
}

fn check_target(terms: &SinrTerms, rho_u: f64, target: f64, opts: &MaxMinOptions) -> Feasibility {
    let k_ues = terms.num_ues();
    let mut eta = vec![0.0; k_ues];
    let mut next = vec![0.0; k_ues];
    for _ in 0..opts.fixed_point_budget {
        let mut delta: f64 = 0.0;
        for k in 0..k_ues {
            let raw = target * terms.interference(k, &eta, rho_u) / (rho_u * terms.signal[k]);
            if raw > 1.0 + SATURATION_SLACK {
                return Feasibility::Infeasible;
            }
            next[k] = raw.min(1.0);
            delta = delta.max((next[k] - eta[k]).abs());
        }
        std::mem::swap(&mut eta, &mut next);
        if delta <= opts.fixed_point_tol {
            // The iterates approach the limit from below; replace them by the
            // exact limit so the target is met with equality.
            return match solve_fixed_point(terms, rho_u, target) {
                Feasibility::Feasible(exact) => Feasibility::Feasible(exact),
                Feasibility::Infeasible => Feasibility::Feasible(eta),
            };
        }
    }
    solve_fixed_point(terms, rho_u, target)
}

/// Max-min fair power coefficients for precomputed SINR terms.
///
/// The bracket starts at the smallest full-power SINR (always feasible, since
/// `η = 1` meets it) and the smallest interference-free single-user SINR
/// (no power vector can give every UE more). The returned vector is the
/// minimal one meeting the best feasible target, so every UE ends up with
/// that same SINR.
pub fn max_min_power_terms(
    terms: &SinrTerms,
    rho_u: f64,
    opts: &MaxMinOptions,
) -> Result<MaxMinSolution> {
    let k_ues = terms.num_ues();
    if k_ues == 0 {
        return Ok(MaxMinSolution {
            power: PowerCoefficients { eta: vec![] },
            target: f64::INFINITY,
            bisection_steps: 0,
        });
    }
    if !(opts.target_tol > 0.0) {
        return Err(Error::InvalidInput("target tolerance must be positive".into()));
    }
    if terms.signal.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidInput(
            "every UE needs a nonzero estimated channel".into(),
        ));
    }
    let full = vec![1.0; k_ues];
    let mut lo = terms
        .sinr(&full, rho_u)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let mut hi = (0..k_ues)
        .map(|k| {
            let mut solo = vec![0.0; k_ues];
            solo[k] = 1.0;
            terms.sinr_of(k, &solo, rho_u)
        })
        .fold(f64::INFINITY, f64::min);
    hi = hi.max(lo);

    let mut best = match check_target(terms, rho_u, lo, opts) {
        Feasibility::Feasible(eta) => eta,
        _ => full,
    };
    let mut steps = 0;
    while hi > lo * (1.0 + opts.target_tol) {
        if steps == opts.bisection_budget {
            return Err(Error::PowerControl { best_target: lo });
        }
        steps += 1;
        let mid = (lo * hi).sqrt();
        match check_target(terms, rho_u, mid, opts) {
            Feasibility::Feasible(eta) => {
                lo = mid;
                best = eta;
            }
            Feasibility::Infeasible => hi = mid,
        }
    }

    for e in best.iter_mut().filter(|e| **e > 1.0 - SATURATION_SLACK) {
        *e = 1.0;
    }
    Ok(MaxMinSolution {
        power: PowerCoefficients { eta: best },
        target: lo,
        bisection_steps: steps,
    })
}

/// Max-min fair power coefficients for a pilot assignment, with relative
/// tolerance `tol` on the common SINR target.
pub fn max_min_power(
    beta: &Array2<f64>,
    gamma: &Array2<f64>,
    assignment: &PilotAssignment,
    rho_u: f64,
    tol: f64,
) -> Result<PowerCoefficients> {
    let terms = SinrTerms::new(beta, gamma, assignment)?;
    let opts = MaxMinOptions {
        target_tol: tol,
        ..MaxMinOptions::default()
    };
    Ok(max_min_power_terms(&terms, rho_u, &opts)?.power)
}

/// Registered power policy names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PowerPolicy {
    Full,
    #[default]
    MaxMin,
}

impl PowerPolicy {
    pub fn name(self) -> &'static str {
        match self {
            PowerPolicy::Full => "full",
            PowerPolicy::MaxMin => "maxmin",
        }
    }

    pub fn coefficients(self, terms: &SinrTerms, rho_u: f64) -> Result<PowerCoefficients> {
        match self {
            PowerPolicy::Full => Ok(full_power(terms.num_ues())),
            PowerPolicy::MaxMin => {
                Ok(max_min_power_terms(terms, rho_u, &MaxMinOptions::default())?.power)
            }
        }
    }
}

impl fmt::Display for PowerPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PowerPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(PowerPolicy::Full),
            "maxmin" => Ok(PowerPolicy::MaxMin),
            other => Err(Error::Config(format!("unknown power policy `{other}`"))),
        }
    }
}
