//! Empirical-measure summaries and the first rain-formation detector.

use serde::{Deserialize, Serialize};

use crate::coalescence::MergeEvent;
use crate::domain::Particle;

/// Detection threshold and moment orders of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableConfig {
    /// Radius at which a droplet counts as rain (inclusive).
    pub rain_radius: f64,
    pub moment_orders: Vec<f64>,
}

impl ObservableConfig {
    pub fn new(rain_radius: f64) -> Self {
        assert!(rain_radius > 0.0, "rain radius must be positive");
        ObservableConfig {
            rain_radius,
            moment_orders: vec![0.0, 1.0, 2.0],
        }
    }
}

/// True iff some alive droplet has radius at or above the rain threshold.
/// Monotone along a trajectory: volumes never shrink.
pub fn detect_first_rain(particles: &[Particle], cfg: &ObservableConfig) -> bool {
    particles
        .iter()
        .any(|p| p.alive && p.radius() >= cfg.rain_radius)
}

/// Volume moment of the empirical measure, `(1/N0) sum_alive v^p`.
///
/// Normalized by the initial population size (the slice length: removed
/// droplets keep their slot), so the first moment is conserved under
/// merges.
pub fn empirical_moment(particles: &[Particle], p: f64) -> f64 {
    let n0 = particles.len() as f64;
    if n0 == 0.0 {
        return 0.0;
    }
    crate::numeric::compensated_sum(
        particles
            .iter()
            .filter(|q| q.alive)
            .map(|q| q.volume.powf(p)),
    ) / n0
}

/// Outcome of one replica.
///
/// `formation_epoch` is the first epoch at which the detector fired
/// (`None` if the replica was censored by the iteration cap);
/// `formation_time = formation_epoch * dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaResult {
    pub formation_epoch: Option<u64>,
    pub formation_time: Option<f64>,
    pub events: Vec<MergeEvent>,
    pub final_alive: usize,
    pub initial_volume: f64,
    pub final_volume: f64,
}

impl ReplicaResult {
    /// Censored replicas hit the iteration cap without forming rain.
    pub fn is_censored(&self) -> bool {
        self.formation_epoch.is_none()
    }
}
