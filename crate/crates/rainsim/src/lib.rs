//! Stochastic particle simulator of droplet coagulation on a periodic
//! 2-D domain, under Brownian motion, gravitational settling, and an
//! Ornstein-Uhlenbeck-driven vortex velocity field, with a Monte Carlo
//! harness that measures the first rain-formation time and fits the
//! parameter-sweep regressions.
//!
//! Everything is deterministic by `(seed, stream id)`: replicas own
//! counter-based random streams, so sweeps reproduce bit-identically
//! across runs and across thread counts.

pub mod coalescence;
pub mod config;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod field;
pub mod kernels;
pub mod numeric;
pub mod observables;
pub mod oracle;
pub mod regression;
pub mod replica;
pub mod rng;
pub mod sweep;
pub mod vec2;

pub use coalescence::{
    coalesce_pass, find_contact_pairs, gillespie_run, stepped_coalescence_run, tn_delta_rate,
    CoalescenceParams, ContactPair, Efficiency, KernelRateParams, MergeEvent,
};
pub use config::{SimConfig, SweepParam};
pub use domain::{radius_from_volume, volume_from_radius, Domain, Particle};
pub use dynamics::{em_step, terminal_speed, MotionParams, TerminalSpeedParams};
pub use error::{Result, SimError};
pub use field::{
    ou_step, sample_vortex_centers, vortex_velocity, OuMode, OuParams, OuState, VortexSet,
};
pub use kernels::{ball_average_error, contact_scale, j_phi_local, j_phi_nonlocal, local_limit_kernel};
pub use observables::{detect_first_rain, empirical_moment, ObservableConfig, ReplicaResult};
pub use oracle::{oracle_compare, OracleComparison};
pub use regression::{fit_loglog, fit_quadratic, fit_rational, ModelKind, RegressionFit};
pub use replica::{run_replica, run_replica_observed};
pub use rng::{ReplicaRng, RngStream};
pub use sweep::{preset, run_sweep, SweepRow, SweepSpec, SweepTable};
pub use vec2::Vec2;
