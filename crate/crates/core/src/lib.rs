//! Uplink cell-free massive MIMO simulation with pilot assignment strategies.
//!
//! The crate is organised bottom-up:
//!
//! - [`topology`] drops APs and UEs on a wrapped square and computes the
//!   large-scale fading matrix for one Monte Carlo realization.
//! - [`chanest`] turns a pilot assignment into MMSE estimation statistics.
//! - [`rate`] evaluates the closed-form uplink SINR under MR combining and
//!   carries a symbol-level validator for it.
//! - [`assignment`] implements the pilot assignment strategies, including the
//!   swap-based repulsive clustering heuristic and exact enumerators.
//! - [`power`] provides full-power and max-min fair power control.
//! - [`harness`] runs paired Monte Carlo experiments and computes statistics.
//!
//! Realization-level loops run on rayon when the `parallel` feature is on
//! (the default); see [`exec`].

pub mod assignment;
pub mod chanest;
mod error;
pub mod exec;
pub mod harness;
pub mod power;
pub mod rate;
pub mod topology;

pub use assignment::{
    exhaustive_sum_rate, greedy_assignment, optimal_repulsive, oracle_assignment,
    random_assignment, repulsion_score, repulsive_heuristic, ClusterMatrix, Euclidean,
    RepulsionFunction, Strategy,
};
pub use chanest::{estimation_quality, EstimationQuality, PilotAssignment};
pub use error::{Error, Result};
pub use exec::Execution;
pub use harness::{run_experiment, ExperimentConfig, ThroughputRecord};
pub use power::{full_power, max_min_power, PowerCoefficients, PowerPolicy};
pub use rate::{sum_rate, throughput, uplink_sinr, RateReport, SinrTerms};
pub use topology::{generate_realization, noise_power, NetworkRealization, Point, SimConfig};
