use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cellfree::harness::{
    parse_list, parse_usize_list, read_records, run_experiment, run_sweep, summarize,
    write_records, write_stats, Sweep, SweepVariable,
};
use cellfree::{Error, Execution, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "cellfree", about = "Cell-free massive MIMO pilot assignment experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a paired Monte Carlo experiment and write per-user records as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated strategy names.
        #[arg(long)]
        strategies: Option<String>,
        #[arg(long)]
        realizations: Option<usize>,
        /// Output CSV; stdout when neither this nor `output_path` is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-strategy throughput percentile of a record CSV.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        /// Percentile in (0, 100].
        #[arg(long, default_value_t = 95.0)]
        percentile: f64,
    },
    /// Repeat an experiment over one variable and tabulate percentiles.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        var: Option<String>,
        #[arg(long)]
        values: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        strategies: Option<String>,
        #[arg(long, default_value_t = 95.0)]
        percentile: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(config: &Path, seed: Option<u64>, strategies: Option<&str>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_file(config)?;
    if let Some(seed) = seed {
        cfg.sim.seed = seed;
    }
    if let Some(list) = strategies {
        cfg.strategies = parse_list(list)?;
    }
    Ok(cfg)
}

fn fraction(percent: f64) -> Result<f64> {
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(Error::Config(format!("percentile {percent} outside (0, 100]")));
    }
    Ok(percent / 100.0)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            strategies,
            realizations,
            out,
        } => {
            let mut cfg = load(&config, seed, strategies.as_deref())?;
            if let Some(n) = realizations {
                cfg.sim.realizations = n;
            }
            cfg.validate()?;
            let records = run_experiment(&cfg)?;
            write_records(open_output(out.as_ref().or(cfg.output_path.as_ref()))?, &records)
        }
        Command::Stats { input, percentile } => {
            let q = fraction(percentile)?;
            let records = read_records(File::open(&input)?)?;
            let summary = summarize(&records, q)?;
            let mut out = io::stdout().lock();
            write_stats(&mut out, &summary)?;
            for s in &summary {
                eprintln!(
                    "{:>18}  p{percentile}: {:8.3} Mbit/s  ({} samples)",
                    s.strategy.name(),
                    s.throughput_bps / 1e6,
                    s.samples
                );
            }
            Ok(())
        }
        Command::Sweep {
            config,
            var,
            values,
            seed,
            strategies,
            percentile,
            out,
        } => {
            let cfg = load(&config, seed, strategies.as_deref())?;
            let sweep = match (var, values, cfg.sweep.clone()) {
                (Some(v), Some(vals), _) => Sweep {
                    variable: v.parse::<SweepVariable>()?,
                    values: parse_usize_list(&vals)?,
                },
                (None, None, Some(s)) => s,
                _ => {
                    return Err(Error::Config(
                        "sweep needs --var and --values (or sweep_var/sweep_values in the config)"
                            .into(),
                    ))
                }
            };
            let mut checked = cfg.clone();
            checked.sweep = Some(sweep.clone());
            checked.validate()?;
            let rows = run_sweep(&cfg, &sweep, fraction(percentile)?, Execution::default())?;
            write_stats(open_output(out.as_ref().or(cfg.output_path.as_ref()))?, &rows)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
