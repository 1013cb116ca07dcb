//! Parameter sweeps: run N_r replicas per grid value, aggregate formation
//! epochs, and bundle the named experiment presets.
//!
//! Replicas execute in parallel; every replica's stream id is
//! `value_index * replicas_per_value + replica_index`, so tables are
//! identical across runs and across worker counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{SimConfig, SweepParam};
use crate::error::{Result, SimError};
use crate::numeric::mean_std;
use crate::observables::ReplicaResult;
use crate::replica::run_replica;

/// A sweep: which parameter varies, over which values, with how many
/// replicas per value, on top of which base configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub varying: SweepParam,
    pub values: Vec<f64>,
    pub replicas_per_value: u32,
    pub base: SimConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(SimError::Config("sweep needs at least one value".into()));
        }
        if !self.values.windows(2).all(|w| w[0] < w[1]) {
            return Err(SimError::Config(
                "sweep values must be strictly ascending".into(),
            ));
        }
        if self.replicas_per_value == 0 {
            return Err(SimError::Config("replicas_per_value must be >= 1".into()));
        }
        for &v in &self.values {
            self.config_for(v)?.validate()?;
        }
        Ok(())
    }

    /// Base configuration from a config file carrying a sweep block.
    pub fn from_config(cfg: SimConfig, replicas_per_value: u32) -> Result<Self> {
        let varying = cfg.sweep_varying.ok_or_else(|| {
            SimError::Config("config has no sweep_varying; cannot run a sweep".into())
        })?;
        let spec = SweepSpec {
            varying,
            values: cfg.sweep_values.clone(),
            replicas_per_value,
            base: cfg,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The base configuration with the varying parameter set to `value`.
    pub fn config_for(&self, value: f64) -> Result<SimConfig> {
        let mut cfg = self.base.clone();
        match self.varying {
            SweepParam::Sigma => cfg.sigma = value,
            SweepParam::Lambda => cfg.lambda = value,
            SweepParam::VortexCount => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(SimError::Config(format!(
                        "vortex count must be a nonnegative integer, got {value}"
                    )));
                }
                cfg.vortex_count = value as usize;
            }
        }
        Ok(cfg)
    }
}

/// Aggregate of the replicas at one grid value. Means and deviations are
/// over uncensored formation epochs only; an all-censored value has no
/// mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub mean_epoch: Option<f64>,
    pub mean_time: Option<f64>,
    pub std_dev: Option<f64>,
    pub censored: u32,
    pub n_replicas: u32,
}

/// A finished sweep with its provenance (config, seed) attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub varying: SweepParam,
    pub master_seed: u64,
    pub replicas_per_value: u32,
    pub base: SimConfig,
    pub rows: Vec<SweepRow>,
}

fn aggregate(value: f64, dt: f64, results: &[ReplicaResult]) -> SweepRow {
    let epochs: Vec<f64> = results
        .iter()
        .filter_map(|r| r.formation_epoch.map(|e| e as f64))
        .collect();
    let censored = (results.len() - epochs.len()) as u32;
    if epochs.is_empty() {
        return SweepRow {
            value,
            mean_epoch: None,
            mean_time: None,
            std_dev: None,
            censored,
            n_replicas: results.len() as u32,
        };
    }
    let (mean, std) = mean_std(&epochs);
    SweepRow {
        value,
        mean_epoch: Some(mean),
        mean_time: Some(mean * dt),
        std_dev: Some(std),
        censored,
        n_replicas: results.len() as u32,
    }
}

/// Run every replica of the sweep. Deterministic in `master_seed`
/// regardless of thread count.
pub fn run_sweep(spec: &SweepSpec, master_seed: u64) -> Result<SweepTable> {
    spec.validate()?;
    let n_r = spec.replicas_per_value as u64;
    let configs: Vec<SimConfig> = spec
        .values
        .iter()
        .map(|&v| spec.config_for(v))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, u64)> = (0..spec.values.len())
        .flat_map(|vi| (0..n_r).map(move |ri| (vi, vi as u64 * n_r + ri)))
        .collect();
    let results: Vec<ReplicaResult> = jobs
        .par_iter()
        .map(|&(vi, stream)| run_replica(&configs[vi], master_seed, stream))
        .collect::<Result<_>>()?;

    let rows = spec
        .values
        .iter()
        .enumerate()
        .map(|(vi, &value)| {
            let chunk = &results[vi * spec.replicas_per_value as usize
                ..(vi + 1) * spec.replicas_per_value as usize];
            aggregate(value, configs[vi].dt, chunk)
        })
        .collect();

    Ok(SweepTable {
        varying: spec.varying,
        master_seed,
        replicas_per_value: spec.replicas_per_value,
        base: spec.base.clone(),
        rows,
    })
}

/// Named experiment presets.
///
/// The three reference protocols run at full scale (N = 1000) and take a
/// while; each has a `-desk` variant shrunk to run in minutes, with the
/// rain threshold and initial radii rescaled so that formation stays
/// observable at the smaller population.
pub fn preset(name: &str) -> Result<SweepSpec> {
    let sigma_grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let vortex_grid = vec![10.0, 25.0, 50.0, 100.0, 200.0];
    let vortex_grid_desk = vec![25.0, 50.0, 100.0, 150.0, 200.0];
    let lambda_grid_fine: Vec<f64> = (0..=100).map(|k| 100.0 + 10.0 * k as f64).collect();
    let lambda_grid_coarse: Vec<f64> = (1..=11).map(|k| 100.0 * k as f64).collect();

    // Desk-scale variant: a denser unit torus with fewer, larger droplets
    // (radii in [0.4, 0.8] x rain_radius), so a short merge cascade reaches
    // the threshold within the iteration cap at every grid point while
    // collisions stay transport-limited. Calibrated so the slowest grid
    // value still forms rain well before 3000 epochs.
    let desk = SimConfig {
        half_width: 1.0,
        n_particles: 300,
        rain_radius: 0.004,
        init_radius_min_factor: 0.4,
        init_radius_max_factor: 0.8,
        ..SimConfig::default()
    };

    let spec = match name {
        "brownian-sweep" => SweepSpec {
            varying: SweepParam::Sigma,
            values: sigma_grid,
            replicas_per_value: 10,
            base: SimConfig {
                eps_bm: true,
                eps_rf: false,
                ..SimConfig::default()
            },
        },
        "brownian-sweep-desk" => SweepSpec {
            varying: SweepParam::Sigma,
            values: sigma_grid,
            replicas_per_value: 10,
            base: SimConfig {
                eps_bm: true,
                eps_rf: false,
                ..desk
            },
        },
        "vortex-sweep" => SweepSpec {
            varying: SweepParam::VortexCount,
            values: vortex_grid,
            replicas_per_value: 10,
            base: SimConfig {
                eps_bm: false,
                eps_rf: true,
                lambda: 1500.0,
                ..SimConfig::default()
            },
        },
        "vortex-sweep-desk" => SweepSpec {
            varying: SweepParam::VortexCount,
            values: vortex_grid_desk,
            replicas_per_value: 10,
            base: SimConfig {
                eps_bm: false,
                eps_rf: true,
                lambda: 1500.0,
                ..desk
            },
        },
        "lambda-sweep" => SweepSpec {
            varying: SweepParam::Lambda,
            values: lambda_grid_fine,
            replicas_per_value: 10,
            base: SimConfig {
                eps_bm: false,
                eps_rf: true,
                vortex_count: 200,
                ..SimConfig::default()
            },
        },
        "lambda-sweep-desk" => SweepSpec {
            varying: SweepParam::Lambda,
            values: lambda_grid_coarse,
            replicas_per_value: 10,
            base: SimConfig {
                eps_bm: false,
                eps_rf: true,
                vortex_count: 200,
                ..desk
            },
        },
        other => {
            return Err(SimError::Config(format!(
                "unknown preset '{other}'; available: brownian-sweep, vortex-sweep, \
                 lambda-sweep and their -desk variants"
            )))
        }
    };
    Ok(spec)
}
