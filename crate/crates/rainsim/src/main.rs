//! Command-line interface: single replicas, parameter sweeps, regression
//! fits, plot-data export, and the coalescence oracle comparison.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical error,
//! 4 I/O error.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use rainsim::error::{Result, SimError};
use rainsim::export::{
    read_sweep_csv, write_plotdata, write_residuals_csv, write_sweep_csv, write_sweep_json,
};
use rainsim::regression::{fit_loglog, fit_quadratic, fit_rational, RegressionFit};
use rainsim::sweep::{preset, run_sweep, SweepSpec};
use rainsim::SimConfig;

#[derive(Parser)]
#[command(name = "rainsim", version, about = "Droplet coagulation simulator and rain-formation experiment harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one replica and print its result as JSON.
    Simulate {
        /// TOML configuration file (key = value).
        #[arg(long)]
        config: PathBuf,
        /// Master seed.
        #[arg(long)]
        seed: u64,
        /// Replica stream id.
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Also write the JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep and write CSV + JSON tables.
    Sweep {
        /// Named preset (brownian-sweep, vortex-sweep, lambda-sweep, or
        /// their -desk variants).
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Config file carrying sweep_varying / sweep_values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replicas per grid value.
        #[arg(long, default_value_t = 10)]
        replicas: u32,
        /// Master seed.
        #[arg(long)]
        seed: u64,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a regression model to a sweep CSV and print the fit as JSON.
    Regress {
        #[arg(long, value_enum)]
        model: RegressModel,
        /// Input sweep CSV.
        #[arg(long = "in")]
        input: PathBuf,
        /// Starting value of a (rational model).
        #[arg(long, default_value_t = 0.08)]
        a_init: f64,
        /// Starting value of b (rational model).
        #[arg(long, default_value_t = 0.048)]
        b_init: f64,
        /// Residuals CSV path (default: alongside the input).
        #[arg(long)]
        residuals_out: Option<PathBuf>,
    },
    /// Extract (x, y, y_err) plot triples from a sweep CSV.
    Plotdata {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare Gillespie and time-stepped coalescence on a frozen cluster.
    OracleCompare {
        /// Droplet count (all pairs in range).
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Time horizon.
        #[arg(long, default_value_t = 2.0)]
        horizon: f64,
        /// Replicas per mode.
        #[arg(long, default_value_t = 5000)]
        replicas: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegressModel {
    Quadratic,
    Loglog,
    Rational,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Simulate {
            config,
            seed,
            stream,
            out,
        } => {
            let cfg = SimConfig::from_path(&config)?;
            let result = rainsim::run_replica(&cfg, seed, stream)?;
            let text = serde_json::to_string_pretty(&result).expect("result serializes");
            println!("{text}");
            if let Some(path) = out {
                fs::write(&path, text).map_err(|e| SimError::io(&path, e))?;
            }
            Ok(())
        }
        Cmd::Sweep {
            preset: preset_name,
            config,
            replicas,
            seed,
            out,
        } => {
            let spec: SweepSpec = match (preset_name, config) {
                (Some(name), None) => {
                    let mut s = preset(&name)?;
                    s.replicas_per_value = replicas;
                    s
                }
                (None, Some(path)) => {
                    let cfg = SimConfig::from_path(&path)?;
                    SweepSpec::from_config(cfg, replicas)?
                }
                _ => {
                    return Err(SimError::Config(
                        "pass exactly one of --preset or --config".into(),
                    ))
                }
            };
            let table = run_sweep(&spec, seed)?;
            fs::create_dir_all(&out).map_err(|e| SimError::io(&out, e))?;
            let csv_path = out.join("sweep.csv");
            let json_path = out.join("sweep.json");
            write_sweep_csv(&csv_path, &table)?;
            write_sweep_json(&json_path, &table)?;
            for row in &table.rows {
                match row.mean_epoch {
                    Some(m) => println!(
                        "{} = {}: mean epoch {:.1}, std {:.1}, censored {}/{}",
                        table.varying,
                        row.value,
                        m,
                        row.std_dev.unwrap_or(0.0),
                        row.censored,
                        row.n_replicas
                    ),
                    None => println!(
                        "{} = {}: all {} replicas censored",
                        table.varying, row.value, row.n_replicas
                    ),
                }
            }
            println!("wrote {} and {}", csv_path.display(), json_path.display());
            Ok(())
        }
        Cmd::Regress {
            model,
            input,
            a_init,
            b_init,
            residuals_out,
        } => {
            let rows = read_sweep_csv(&input)?;
            let mut x = Vec::new();
            let mut time = Vec::new();
            for row in &rows {
                if let Some(t) = row.mean_time {
                    x.push(row.value);
                    time.push(t);
                }
            }
            if time.iter().any(|&t| t <= 0.0) {
                return Err(SimError::Config(
                    "regression needs positive mean formation times".into(),
                ));
            }
            let inverse: Vec<f64> = time.iter().map(|t| 1.0 / t).collect();
            let fit_pair = |y: &[f64]| -> Result<RegressionFit> {
                match model {
                    RegressModel::Quadratic => fit_quadratic(&x, y),
                    RegressModel::Loglog => fit_loglog(&x, y),
                    RegressModel::Rational => fit_rational(&x, y, a_init, b_init),
                }
            };
            let fit_time = fit_pair(&time)?;
            let fit_inverse = fit_pair(&inverse)?;
            let residuals_path = residuals_out.unwrap_or_else(|| {
                let stem = input
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "regression".into());
                input.with_file_name(format!("{stem}_residuals.csv"))
            });
            write_residuals_csv(&residuals_path, &x, &fit_time, &fit_inverse)?;
            let out = serde_json::json!({
                "n_points": x.len(),
                "censored_rows_skipped": rows.len() - x.len(),
                "time_target": fit_time,
                "inverse_time_target": fit_inverse,
                "residuals_csv": residuals_path.display().to_string(),
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
            Ok(())
        }
        Cmd::Plotdata { input, out } => {
            let rows = read_sweep_csv(&input)?;
            write_plotdata(&out, &rows)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Cmd::OracleCompare {
            n,
            horizon,
            replicas,
            seed,
        } => {
            let cmp = rainsim::oracle_compare(n, horizon, replicas, seed)?;
            println!("{}", serde_json::to_string_pretty(&cmp).expect("serializes"));
            Ok(())
        }
    }
}
