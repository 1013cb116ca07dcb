//! Side-by-side comparison of the exact event-driven coalescence process
//! and its time-stepped Bernoulli approximation, on a frozen cluster where
//! every pair is in range.

use serde::Serialize;

use crate::coalescence::{
    gillespie_run, stepped_coalescence_run, Efficiency, KernelRateParams,
};
use crate::domain::{Domain, Particle};
use crate::error::{Result, SimError};
use crate::rng::RngStream;
use crate::vec2::Vec2;

/// Expected merge counts at the horizon under both runners.
#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub n: usize,
    pub horizon: f64,
    pub dt: f64,
    pub replicas: u32,
    pub gillespie_mean_merges: f64,
    pub stepped_mean_merges: f64,
    pub rel_diff: f64,
}

/// Run `replicas` of each mode with unit efficiency on `n` coincident
/// unit-volume droplets and compare mean merge counts at the horizon.
///
/// The step size is the largest one keeping every per-step merge
/// probability at or below 0.01 (capped so the horizon spans at least 20
/// steps). Gillespie replicas consume streams `0..replicas` of the master
/// seed, stepped replicas the following block.
pub fn oracle_compare(
    n: usize,
    horizon: f64,
    replicas: u32,
    seed: u64,
) -> Result<OracleComparison> {
    if n < 2 {
        return Err(SimError::Config(format!("need at least 2 particles, got {n}")));
    }
    if !(horizon > 0.0) {
        return Err(SimError::Config(format!("horizon must be positive, got {horizon}")));
    }
    if replicas == 0 {
        return Err(SimError::Config("need at least one replica".into()));
    }
    let domain = Domain::square(2.0);
    let kp = KernelRateParams::new(1.0, n as f64, Efficiency::Constant(1.0));
    let pair_rate = 0.5 / n as f64;
    let steps = ((horizon * pair_rate / 0.01).ceil() as u64).max(20);
    let dt = horizon / steps as f64;

    let fresh = |_: u64| -> Vec<Particle> {
        (0..n)
            .map(|i| Particle::new(i as u64, Vec2::ZERO, 1.0))
            .collect()
    };

    let mut gillespie_total = 0usize;
    for r in 0..replicas {
        let mut ps = fresh(r.into());
        let mut rng = RngStream::new(seed, r.into()).rng();
        gillespie_total += gillespie_run(&mut ps, &kp, &domain, horizon, &mut rng)?.len();
    }
    let mut stepped_total = 0usize;
    for r in 0..replicas {
        let mut ps = fresh(r.into());
        let mut rng = RngStream::new(seed, u64::from(replicas) + u64::from(r)).rng();
        stepped_total +=
            stepped_coalescence_run(&mut ps, &kp, &domain, horizon, dt, &mut rng)?.len();
    }

    let g = gillespie_total as f64 / f64::from(replicas);
    let s = stepped_total as f64 / f64::from(replicas);
    let rel_diff = (g - s).abs() / g.max(f64::MIN_POSITIVE);
    Ok(OracleComparison {
        n,
        horizon,
        dt,
        replicas,
        gillespie_mean_merges: g,
        stepped_mean_merges: s,
        rel_diff,
    })
}
