//! Pilot assignment strategies.
//!
//! A pilot assignment with `τp` pilots is a partition of the UEs into `τp`
//! clusters. The repulsive strategies maximize the total within-cluster
//! repulsion (sum over co-pilot pairs of a pairwise score) subject to
//! balanced cluster sizes.

mod enumerate;
mod greedy;
mod heuristic;
mod repulsion;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use enumerate::{
    balanced_partitions, exhaustive_sum_rate, exhaustive_sum_rate_with, full_power_sum_rate,
    optimal_repulsive, EXHAUSTIVE_BUDGET, OPTIMAL_REPULSIVE_MAX_UES,
};
pub use greedy::{default_greedy_iterations, greedy_assignment};
pub use heuristic::{repulsive_from, repulsive_heuristic, swap_gain, SwapOutcome, SWAP_TOLERANCE};
pub use repulsion::{Euclidean, RepulsionFunction};

use crate::chanest::PilotAssignment;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::topology::{NetworkRealization, SimConfig};

/// Binary UE-to-cluster association, `K × τp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMatrix {
    rows: Vec<Vec<bool>>,
}

impl ClusterMatrix {
    /// Wraps raw rows without checking the constraints.
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Self {
        ClusterMatrix { rows }
    }

    pub fn from_assignment(assignment: &PilotAssignment, num_pilots: usize) -> Result<Self> {
        if assignment.is_oracle() {
            return Err(Error::InvalidInput(
                "the oracle assignment has no cluster matrix".into(),
            ));
        }
        let rows = assignment
            .pilots()
            .iter()
            .map(|&p| {
                if p >= num_pilots {
                    return Err(Error::IndexOutOfRange {
                        index: p,
                        len: num_pilots,
                    });
                }
                Ok((0..num_pilots).map(|q| q == p).collect())
            })
            .collect::<Result<_>>()?;
        Ok(ClusterMatrix { rows })
    }

    pub fn num_items(&self) -> usize {
        self.rows.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Checks one cluster per row and balanced column sums.
    pub fn validate(&self) -> Result<()> {
        let clusters = self.num_clusters();
        if clusters == 0 {
            return Err(Error::ConstraintViolation("no clusters".into()));
        }
        let mut sizes = vec![0usize; clusters];
        for (k, row) in self.rows.iter().enumerate() {
            if row.len() != clusters {
                return Err(Error::ConstraintViolation(format!("row {k} has wrong width")));
            }
            let count = row.iter().filter(|&&b| b).count();
            if count != 1 {
                return Err(Error::ConstraintViolation(format!(
                    "UE {k} belongs to {count} clusters"
                )));
            }
            let p = row.iter().position(|&b| b).expect("exactly one");
            sizes[p] += 1;
        }
        let lo = self.num_items() / clusters;
        if let Some((p, size)) = sizes
            .iter()
            .enumerate()
            .find(|(_, &s)| s < lo || s > lo + 1)
        {
            return Err(Error::ConstraintViolation(format!(
                "cluster {p} has {size} members, allowed [{lo}, {}]",
                lo + 1
            )));
        }
        Ok(())
    }

    fn labels(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|&b| b).unwrap_or(usize::MAX))
            .collect()
    }

    pub fn to_assignment(&self) -> Result<PilotAssignment> {
        self.validate()?;
        PilotAssignment::new(self.labels(), self.num_clusters())
    }
}

/// Total within-cluster repulsion of a valid cluster matrix.
pub fn repulsion_score<F: RepulsionFunction + ?Sized>(x: &ClusterMatrix, f: &F) -> Result<f64> {
    x.validate()?;
    if f.len() != x.num_items() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} items", x.num_items()),
            actual: format!("{}", f.len()),
        });
    }
    let labels = x.labels();
    let mut total = 0.0;
    for a in 0..labels.len() {
        for b in (a + 1)..labels.len() {
            if labels[a] == labels[b] {
                total += f.repulsion(a, b);
            }
        }
    }
    Ok(total)
}

/// Balanced random partition: shuffle the UEs and deal them round-robin.
pub fn random_assignment(num_ues: usize, num_pilots: usize, seed: u64) -> Result<PilotAssignment> {
    if num_ues == 0 || num_pilots == 0 {
        return Err(Error::InvalidInput(
            "need at least one UE and one pilot".into(),
        ));
    }
    let mut order: Vec<usize> = (0..num_ues).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut pilots = vec![0; num_ues];
    for (slot, &ue) in order.iter().enumerate() {
        pilots[ue] = slot % num_pilots;
    }
    Ok(PilotAssignment::from_vec_unchecked(pilots))
}

pub fn oracle_assignment(num_ues: usize) -> PilotAssignment {
    PilotAssignment::oracle(num_ues)
}

/// Registered strategy names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Random,
    Greedy,
    Repulsive,
    OptimalRepulsive,
    Exhaustive,
    Oracle,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Random,
        Strategy::Greedy,
        Strategy::Repulsive,
        Strategy::OptimalRepulsive,
        Strategy::Exhaustive,
        Strategy::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Greedy => "greedy",
            Strategy::Repulsive => "repulsive",
            Strategy::OptimalRepulsive => "optimal-repulsive",
            Strategy::Exhaustive => "exhaustive",
            Strategy::Oracle => "oracle",
        }
    }

    /// Pilot assignment for one realization. Randomized strategies all start
    /// from the same balanced random partition drawn from `seed`.
    pub fn assign(
        self,
        realization: &NetworkRealization,
        cfg: &SimConfig,
        seed: u64,
        greedy_iterations: Option<usize>,
        exec: Execution,
    ) -> Result<PilotAssignment> {
        let k_ues = realization.num_ues();
        let features = || Euclidean::from_points(&realization.ue_positions);
        match self {
            Strategy::Random => random_assignment(k_ues, cfg.num_pilots, seed),
            Strategy::Greedy => greedy_assignment(
                realization,
                cfg,
                seed,
                greedy_iterations.unwrap_or_else(|| default_greedy_iterations(k_ues)),
            ),
            Strategy::Repulsive => repulsive_heuristic(&features(), cfg.num_pilots, seed),
            Strategy::OptimalRepulsive => optimal_repulsive(&features(), cfg.num_pilots),
            Strategy::Exhaustive => exhaustive_sum_rate_with(realization, cfg, exec),
            Strategy::Oracle => Ok(oracle_assignment(k_ues)),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown strategy `{s}`")))
    }
}

impl serde::Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> serde::Deserialize<'de> for Strategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
