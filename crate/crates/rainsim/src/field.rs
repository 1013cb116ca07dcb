//! The turbulence surrogate: a finite family of vortex-shaped vector
//! fields modulated by independent Ornstein-Uhlenbeck processes.
//!
//! The velocity field is `U(t, x) = sum_k sigma_k(x) xi_t^k` with
//! `sigma_k(x) = (1/2pi) (x - x_k)^perp / (|x - x_k|^2 + reg_eps^2)` and
//! each `xi^k` solving `d xi = -lambda xi dt + lambda dB`, started at 0.
//! The stationary variance of `xi` is `lambda / 2`.

use rand::Rng;

use crate::domain::Domain;
use crate::error::{Result, SimError};
use crate::vec2::Vec2;

use std::f64::consts::PI;

/// Time-stepping scheme for the OU processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OuMode {
    /// Euler-Maruyama update `xi' = xi - lambda xi dt + lambda sqrt(dt) Z`.
    #[default]
    Euler,
    /// Exact Gaussian transition
    /// `xi' = e^(-lambda dt) xi + lambda sqrt((1 - e^(-2 lambda dt)) / (2 lambda)) Z`.
    Exact,
}

/// OU intensity and step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuParams {
    pub lambda: f64,
    pub dt: f64,
    pub mode: OuMode,
}

impl OuParams {
    pub fn new(lambda: f64, dt: f64, mode: OuMode) -> Self {
        OuParams { lambda, dt, mode }
    }
}

/// State of the K modulating processes at the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct OuState {
    pub values: Vec<f64>,
    pub time: f64,
}

impl OuState {
    /// All-zero start, the process' initial condition.
    pub fn zeros(k: usize) -> Self {
        OuState {
            values: vec![0.0; k],
            time: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Advance every component by one step using the given standard-normal
/// draws (one per component).
///
/// The Euler scheme requires `lambda * dt < 1`; violating it is a stability
/// error. The exact scheme shares the guard so sweeping lambda cannot
/// silently change meaning between modes.
pub fn ou_step(state: &mut OuState, p: &OuParams, noise: &[f64]) -> Result<()> {
    assert_eq!(
        noise.len(),
        state.values.len(),
        "ou_step: need one draw per component"
    );
    if p.lambda * p.dt >= 1.0 {
        return Err(SimError::Numerical(format!(
            "OU step unstable: lambda ({}) * dt ({}) = {} >= 1",
            p.lambda,
            p.dt,
            p.lambda * p.dt
        )));
    }
    match p.mode {
        OuMode::Euler => {
            let drift = 1.0 - p.lambda * p.dt;
            let diff = p.lambda * p.dt.sqrt();
            for (xi, z) in state.values.iter_mut().zip(noise) {
                *xi = drift * *xi + diff * z;
            }
        }
        OuMode::Exact => {
            let a = (-p.lambda * p.dt).exp();
            let b = if p.lambda > 0.0 {
                p.lambda * ((1.0 - (-2.0 * p.lambda * p.dt).exp()) / (2.0 * p.lambda)).sqrt()
            } else {
                0.0
            };
            for (xi, z) in state.values.iter_mut().zip(noise) {
                *xi = a * *xi + b * z;
            }
        }
    }
    state.time += p.dt;
    Ok(())
}

/// Frozen vortex centers plus the regularization length for the
/// Biot-Savart-like kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexSet {
    pub centers: Vec<Vec2>,
    pub reg_eps: f64,
}

impl VortexSet {
    pub fn new(centers: Vec<Vec2>, reg_eps: f64) -> Self {
        assert!(reg_eps >= 0.0, "regularization length must be >= 0");
        VortexSet { centers, reg_eps }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Draw `k` i.i.d. uniform vortex centers over the domain.
pub fn sample_vortex_centers(
    k: usize,
    reg_eps: f64,
    d: &Domain,
    rng: &mut impl Rng,
) -> VortexSet {
    let side = d.side();
    let centers = (0..k)
        .map(|_| {
            let x = rng.random::<f64>() * side - d.half_width();
            let y = rng.random::<f64>() * side - d.half_width();
            Vec2::new(x, y)
        })
        .collect();
    VortexSet::new(centers, reg_eps)
}

/// Evaluate `U(x) = sum_k xi^k sigma_k(x)` with minimal-image displacements.
///
/// A vortex contributes exactly zero at its own center, matching the
/// convention `sigma_k(x_k) = 0`.
pub fn vortex_velocity(x: Vec2, vs: &VortexSet, xi: &OuState, d: &Domain) -> Vec2 {
    debug_assert_eq!(vs.len(), xi.len(), "one OU component per vortex");
    let reg2 = vs.reg_eps * vs.reg_eps;
    let mut u = Vec2::ZERO;
    for (center, &amp) in vs.centers.iter().zip(&xi.values) {
        let r = d.min_image(*center, x);
        let r2 = r.norm_sq();
        if r2 == 0.0 {
            continue;
        }
        let scale = amp / (2.0 * PI * (r2 + reg2));
        u += r.perp() * scale;
    }
    u
}
