//! Paired Monte Carlo experiments, CSV export, and summary statistics.
//!
//! Every strategy in a run sees the same realizations (topology and
//! shadowing), and the randomized strategies share the same initial random
//! partition per realization, so differences between strategies are paired.

mod config;
mod stats;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

pub use config::{parse_list, parse_usize_list, ExperimentConfig, Sweep, SweepVariable};
pub use stats::{empirical_cdf, ks_distance, percentile};

use crate::assignment::Strategy;
use crate::chanest::{estimation_quality, PilotAssignment};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::power::PowerPolicy;
use crate::rate::{RateReport, SinrTerms};
use crate::topology::{generate_realization, realization_seed, splitmix64, NetworkRealization, SimConfig};

/// Exact CSV header for throughput records.
pub const RECORD_HEADER: &str = "realization,strategy,ue,sinr,throughput_bps";

/// Comment line written ahead of every percentile table.
pub const PERCENTILE_NOTE: &str = "# nearest-rank percentile: ceil(q*N)-th smallest sample, no interpolation";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputRecord {
    pub realization: u64,
    pub strategy: Strategy,
    pub ue: usize,
    pub sinr: f64,
    pub throughput_bps: f64,
}

/// Seed for the randomized strategies on one realization.
pub fn assignment_seed(seed: u64, realization: u64) -> u64 {
    splitmix64(realization_seed(seed, realization) ^ 0x5eed_a551_6e00_0000)
}

/// Assignment, power control, and rates for one strategy on one realization.
pub fn evaluate_strategy(
    realization: &NetworkRealization,
    sim: &SimConfig,
    strategy: Strategy,
    policy: PowerPolicy,
    seed: u64,
    greedy_iterations: Option<usize>,
    exec: Execution,
) -> Result<(PilotAssignment, RateReport)> {
    let assignment = strategy.assign(realization, sim, seed, greedy_iterations, exec)?;
    let quality = estimation_quality(&realization.beta, &assignment, sim.num_pilots, sim.rho_p())?;
    let terms = SinrTerms::new(&realization.beta, &quality.gamma, &assignment)?;
    let rho_u = sim.rho_u();
    let eta = policy.coefficients(&terms, rho_u)?;
    let report = RateReport::new(terms.sinr(&eta.eta, rho_u), sim);
    Ok((assignment, report))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ThroughputRecord>> {
    run_experiment_with(cfg, Execution::default())
}

/// Records for every realization, strategy, and UE, sorted in that order.
pub fn run_experiment_with(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<ThroughputRecord>> {
    cfg.validate()?;
    let sim = &cfg.sim;
    let mut strategies = cfg.strategies.clone();
    strategies.sort();
    strategies.dedup();

    let per_realization = exec.map(sim.realizations, |r| -> Result<Vec<ThroughputRecord>> {
        let index = r as u64;
        let realization = generate_realization(sim, index);
        let seed = assignment_seed(sim.seed, index);
        let mut rows = Vec::with_capacity(strategies.len() * sim.num_ues);
        for &strategy in &strategies {
            let (_, report) = evaluate_strategy(
                &realization,
                sim,
                strategy,
                cfg.power_policy,
                seed,
                cfg.greedy_iterations,
                Execution::Sequential,
            )?;
            rows.extend(report.sinr.iter().zip(&report.throughput).enumerate().map(
                |(ue, (&sinr, &throughput_bps))| ThroughputRecord {
                    realization: index,
                    strategy,
                    ue,
                    sinr,
                    throughput_bps,
                },
            ));
        }
        Ok(rows)
    });

    let mut records = Vec::with_capacity(sim.realizations * strategies.len() * sim.num_ues);
    for rows in per_realization {
        records.extend(rows?);
    }
    Ok(records)
}

pub fn write_records<W: Write>(out: W, records: &[ThroughputRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(RECORD_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<ThroughputRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != RECORD_HEADER {
        return Err(Error::InvalidInput(format!(
            "unexpected CSV header `{}`",
            header.join(",")
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Percentile of per-user throughput for one strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub samples: usize,
    pub percentile: f64,
    pub throughput_bps: f64,
}

/// Nearest-rank `q` percentile of throughput per strategy, in strategy order.
pub fn summarize(records: &[ThroughputRecord], q: f64) -> Result<Vec<StrategySummary>> {
    let mut strategies: Vec<Strategy> = records.iter().map(|r| r.strategy).collect();
    strategies.sort();
    strategies.dedup();
    strategies
        .into_iter()
        .map(|strategy| {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.strategy == strategy)
                .map(|r| r.throughput_bps)
                .collect();
            Ok(StrategySummary {
                strategy,
                samples: values.len(),
                percentile: q,
                throughput_bps: percentile(&values, q)?,
            })
        })
        .collect()
}

pub fn throughputs_of(records: &[ThroughputRecord], strategy: Strategy) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.strategy == strategy)
        .map(|r| r.throughput_bps)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variable: String,
    pub value: usize,
    pub strategy: Strategy,
    pub percentile: f64,
    pub throughput_bps: f64,
}

/// One experiment per sweep value, reduced to a percentile per strategy.
pub fn run_sweep(cfg: &ExperimentConfig, sweep: &Sweep, q: f64, exec: Execution) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &value in &sweep.values {
        let mut point = cfg.clone();
        sweep.variable.apply(&mut point.sim, value);
        point.sweep = None;
        let records = run_experiment_with(&point, exec)?;
        rows.extend(summarize(&records, q)?.into_iter().map(|s| SweepRow {
            variable: sweep.variable.name().to_owned(),
            value,
            strategy: s.strategy,
            percentile: q,
            throughput_bps: s.throughput_bps,
        }));
    }
    Ok(rows)
}

/// Writes serializable rows as CSV preceded by [`PERCENTILE_NOTE`].
pub fn write_stats<W: Write, T: Serialize>(mut out: W, rows: &[T]) -> Result<()> {
    writeln!(out, "{PERCENTILE_NOTE}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_rows<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}
