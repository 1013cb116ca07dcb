//! Position updates: Euler-Maruyama step combining random-field advection,
//! gravitational settling at a volume-dependent terminal speed, and
//! independent Brownian motion.
//!
//! Per epoch the update for an alive particle is
//!
//! `X' = wrap(X + eps_rf U(X) dt - e2 f(V) dt + eps_bm sigma sqrt(dt) Z)`
//!
//! with `e2` the downward unit vector and `Z` a fresh 2-D standard normal
//! assigned by particle index. Dead particles are untouched; volumes never
//! change here.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::domain::{sphere_radius, Domain, Particle};
use crate::error::{Result, SimError};
use crate::field::{vortex_velocity, OuState, VortexSet};
use crate::vec2::Vec2;

/// Anchored logistic terminal-speed profile.
///
/// The speed is zero at zero volume and approaches `v_max` for large
/// droplets: `f(V) = v_max (L(R) - L(0)) / (1 - L(0))` with
/// `L(r) = 1 / (1 + exp(-steepness (r - r_half)))` and `R` the sphere
/// radius of `V`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TerminalSpeedParams {
    pub v_max: f64,
    pub r_half: f64,
    pub steepness: f64,
}

impl TerminalSpeedParams {
    pub fn new(v_max: f64, r_half: f64, steepness: f64) -> Self {
        assert!(v_max >= 0.0, "v_max must be >= 0");
        assert!(r_half > 0.0, "r_half must be > 0");
        assert!(steepness > 0.0, "steepness must be > 0");
        TerminalSpeedParams {
            v_max,
            r_half,
            steepness,
        }
    }
}

fn logistic(r: f64, p: &TerminalSpeedParams) -> f64 {
    1.0 / (1.0 + (-p.steepness * (r - p.r_half)).exp())
}

/// Terminal settling speed of a droplet of volume `v` (`v >= 0`).
/// Monotone nondecreasing, zero at zero volume, `v_max` in the limit.
pub fn terminal_speed(v: f64, p: &TerminalSpeedParams) -> f64 {
    debug_assert!(v >= 0.0, "terminal_speed expects v >= 0");
    if v <= 0.0 || p.v_max == 0.0 {
        return 0.0;
    }
    let r = sphere_radius(v);
    let l0 = logistic(0.0, p);
    p.v_max * (logistic(r, p) - l0) / (1.0 - l0)
}

/// Switches and intensities of the positional dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionParams {
    /// Random-field advection switch.
    pub eps_rf: bool,
    /// Independent Brownian switch.
    pub eps_bm: bool,
    /// Brownian intensity (>= 0).
    pub sigma: f64,
    /// Time step (> 0).
    pub dt: f64,
    pub settling: TerminalSpeedParams,
    /// Uniform drag factor applied to the advection term (hook for a
    /// volume-dependent drag; the simulated system uses 1).
    pub field_drag: f64,
}

/// Advance all alive particles by one Euler-Maruyama step.
///
/// Brownian draws are consumed only when `eps_bm` is set, two per alive
/// particle in index order. Positions come out wrapped; ids, volumes and
/// alive flags are untouched.
pub fn em_step(
    particles: &mut [Particle],
    field: Option<(&VortexSet, &OuState)>,
    mp: &MotionParams,
    d: &Domain,
    rng: &mut impl Rng,
) -> Result<()> {
    let noise_scale = mp.sigma * mp.dt.sqrt();
    for p in particles.iter_mut() {
        if !p.alive {
            continue;
        }
        let mut disp = Vec2::ZERO;
        if mp.eps_rf {
            if let Some((vs, xi)) = field {
                let u = vortex_velocity(p.pos, vs, xi, d);
                disp += u * (mp.field_drag * mp.dt);
            }
        }
        disp.y -= terminal_speed(p.volume, &mp.settling) * mp.dt;
        if mp.eps_bm {
            let zx: f64 = rng.sample(StandardNormal);
            let zy: f64 = rng.sample(StandardNormal);
            disp += Vec2::new(zx, zy) * noise_scale;
        }
        if !disp.is_finite() {
            return Err(SimError::Numerical(format!(
                "non-finite displacement for particle {} at ({}, {})",
                p.id, p.pos.x, p.pos.y
            )));
        }
        p.pos = d.wrap(p.pos + disp);
    }
    Ok(())
}
