//! Simulation configuration: a flat `key = value` document (TOML scalars)
//! mirroring every physical and numerical parameter.
//!
//! Defaults follow the reference experiment: domain `[-2, 2]^2`,
//! `dt = 0.0001`, `N = 1000`, `T_MaxIt = 3000`, rain radius `0.0004`,
//! initial radii drawn uniformly from `[0.01, 0.1] x rain_radius`.
//! The length unit is the nondimensional simulation unit; the domain
//! half-width is 2 length units by convention.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coalescence::CoalescenceParams;
use crate::dynamics::{MotionParams, TerminalSpeedParams};
use crate::error::{Result, SimError};
use crate::field::{OuMode, OuParams};
use crate::observables::ObservableConfig;

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Sigma,
    VortexCount,
    Lambda,
}

impl std::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepParam::Sigma => write!(f, "sigma"),
            SweepParam::VortexCount => write!(f, "vortex_count"),
            SweepParam::Lambda => write!(f, "lambda"),
        }
    }
}

/// All physical and numerical parameters of one replica, plus an optional
/// sweep description for the `sweep` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Domain half-width; the domain is the periodic square
    /// `[-half_width, half_width)^2`.
    pub half_width: f64,
    /// Initial droplet count N.
    pub n_particles: usize,
    /// Time step.
    pub dt: f64,
    /// Iteration cap T_MaxIt; replicas that never form rain are censored.
    pub max_epochs: u64,
    /// Random-field advection switch (eps_rf).
    pub eps_rf: bool,
    /// Independent Brownian switch (eps_bm).
    pub eps_bm: bool,
    /// Brownian intensity.
    pub sigma: f64,
    /// OU intensity lambda.
    pub lambda: f64,
    /// Number of vortices |H| (used when eps_rf is on).
    pub vortex_count: usize,
    /// Regularization length of the vortex kernel.
    pub vortex_reg_eps: f64,
    /// OU integrator: "euler" (reference scheme) or "exact".
    pub ou_mode: OuMode,
    /// Keep one quenched vortex layout across all replicas instead of
    /// resampling per replica.
    pub pin_vortices: bool,
    /// Bounce threshold: a contact merges when a uniform draw exceeds it.
    pub p_mean: f64,
    /// Rain detection radius R_rd.
    pub rain_radius: f64,
    /// Initial radii are uniform on
    /// `[init_radius_min_factor, init_radius_max_factor] x rain_radius`.
    pub init_radius_min_factor: f64,
    pub init_radius_max_factor: f64,
    /// Asymptotic terminal settling speed.
    pub v_max: f64,
    /// Radius of half terminal speed; defaults to `5 x rain_radius`.
    pub r_half: Option<f64>,
    /// Logistic slope; defaults to `2 / r_half`.
    pub steepness: Option<f64>,
    /// Uniform drag factor on the advection term.
    pub field_drag: f64,
    /// Sweep description (only consulted by the sweep runner).
    pub sweep_varying: Option<SweepParam>,
    pub sweep_values: Vec<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            half_width: 2.0,
            n_particles: 1000,
            dt: 1e-4,
            max_epochs: 3000,
            eps_rf: false,
            eps_bm: true,
            sigma: 1.0,
            lambda: 1500.0,
            vortex_count: 0,
            vortex_reg_eps: 0.01,
            ou_mode: OuMode::Euler,
            pin_vortices: false,
            p_mean: 0.0,
            rain_radius: 0.0004,
            init_radius_min_factor: 0.01,
            init_radius_max_factor: 0.1,
            v_max: 1.0,
            r_half: None,
            steepness: None,
            field_drag: 1.0,
            sweep_varying: None,
            sweep_values: Vec::new(),
        }
    }
}

impl SimConfig {
    /// Parse a TOML document; unknown keys are rejected.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            toml::from_str(text).map_err(|e| SimError::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Resolved half-speed radius.
    pub fn r_half(&self) -> f64 {
        self.r_half.unwrap_or(5.0 * self.rain_radius)
    }

    /// Resolved logistic slope.
    pub fn steepness(&self) -> f64 {
        self.steepness.unwrap_or(2.0 / self.r_half())
    }

    /// Smallest and largest initial radius.
    pub fn init_radius_range(&self) -> (f64, f64) {
        (
            self.init_radius_min_factor * self.rain_radius,
            self.init_radius_max_factor * self.rain_radius,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(SimError::Config(msg));
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return fail(format!("half_width must be positive, got {}", self.half_width));
        }
        if self.n_particles < 2 {
            return fail(format!("n_particles must be >= 2, got {}", self.n_particles));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return fail(format!("dt must be positive, got {}", self.dt));
        }
        if self.max_epochs == 0 {
            return fail("max_epochs must be >= 1".into());
        }
        if self.sigma < 0.0 {
            return fail(format!("sigma must be >= 0, got {}", self.sigma));
        }
        if self.lambda < 0.0 {
            return fail(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if self.lambda * self.dt >= 1.0 {
            return fail(format!(
                "OU step unstable: lambda ({}) * dt ({}) must stay below 1",
                self.lambda, self.dt
            ));
        }
        if !(0.0..=1.0).contains(&self.p_mean) {
            return fail(format!("p_mean must lie in [0, 1], got {}", self.p_mean));
        }
        if !(self.rain_radius > 0.0) {
            return fail(format!("rain_radius must be positive, got {}", self.rain_radius));
        }
        if !(self.init_radius_min_factor > 0.0) {
            return fail(format!(
                "init_radius_min_factor must be positive, got {}",
                self.init_radius_min_factor
            ));
        }
        if self.init_radius_max_factor < self.init_radius_min_factor {
            return fail(format!(
                "init radius factors out of order: {} > {}",
                self.init_radius_min_factor, self.init_radius_max_factor
            ));
        }
        if self.init_radius_max_factor * self.rain_radius >= self.half_width {
            return fail("initial radii must be smaller than the domain".into());
        }
        if self.v_max < 0.0 {
            return fail(format!("v_max must be >= 0, got {}", self.v_max));
        }
        if !(self.r_half() > 0.0) {
            return fail(format!("r_half must be positive, got {}", self.r_half()));
        }
        if !(self.steepness() > 0.0) {
            return fail(format!("steepness must be positive, got {}", self.steepness()));
        }
        if self.vortex_reg_eps < 0.0 {
            return fail(format!(
                "vortex_reg_eps must be >= 0, got {}",
                self.vortex_reg_eps
            ));
        }
        if !(self.field_drag >= 0.0 && self.field_drag.is_finite()) {
            return fail(format!("field_drag must be >= 0, got {}", self.field_drag));
        }
        if let Some(varying) = self.sweep_varying {
            if self.sweep_values.is_empty() {
                return fail("sweep_values must be nonempty when sweep_varying is set".into());
            }
            if !self.sweep_values.windows(2).all(|w| w[0] < w[1]) {
                return fail("sweep_values must be strictly ascending".into());
            }
            if varying == SweepParam::VortexCount
                && self.sweep_values.iter().any(|v| v.fract() != 0.0 || *v < 0.0)
            {
                return fail("vortex_count sweep values must be nonnegative integers".into());
            }
        }
        Ok(())
    }

    pub fn motion_params(&self) -> MotionParams {
        MotionParams {
            eps_rf: self.eps_rf,
            eps_bm: self.eps_bm,
            sigma: self.sigma,
            dt: self.dt,
            settling: TerminalSpeedParams::new(self.v_max, self.r_half(), self.steepness()),
            field_drag: self.field_drag,
        }
    }

    pub fn ou_params(&self) -> OuParams {
        OuParams::new(self.lambda, self.dt, self.ou_mode)
    }

    pub fn coalescence_params(&self) -> CoalescenceParams {
        CoalescenceParams::new(self.p_mean)
    }

    pub fn observable_config(&self) -> ObservableConfig {
        ObservableConfig::new(self.rain_radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_round_trips() {
        let cfg = SimConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml();
        let back = SimConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn resolved_settling_defaults() {
        let cfg = SimConfig::default();
        assert_eq!(cfg.r_half(), 0.002);
        assert_eq!(cfg.steepness(), 1000.0);
        let with = SimConfig {
            r_half: Some(0.01),
            ..SimConfig::default()
        };
        assert_eq!(with.steepness(), 200.0);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = SimConfig::from_toml("unknown_knob = 3").unwrap_err();
        assert!(err.to_string().contains("unknown_knob"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unstable_ou_rejected() {
        let cfg = SimConfig {
            lambda: 20_000.0,
            ..SimConfig::default()
        };
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("lambda"), "{err}");
    }

    #[test]
    fn tiny_population_rejected() {
        let cfg = SimConfig {
            n_particles: 1,
            ..SimConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn bad_p_mean_rejected() {
        for p in [-0.1, 1.5] {
            let cfg = SimConfig {
                p_mean: p,
                ..SimConfig::default()
            };
            assert!(cfg.validate().is_err(), "p_mean {p} accepted");
        }
    }

    #[test]
    fn sweep_block_validation() {
        let mut cfg = SimConfig {
            sweep_varying: Some(SweepParam::Sigma),
            sweep_values: vec![0.3, 0.2],
            ..SimConfig::default()
        };
        assert!(cfg.validate().is_err(), "unsorted values accepted");
        cfg.sweep_values = vec![0.2, 0.3];
        cfg.validate().unwrap();
        cfg.sweep_varying = Some(SweepParam::VortexCount);
        cfg.sweep_values = vec![10.0, 25.5];
        assert!(cfg.validate().is_err(), "fractional vortex count accepted");
    }

    #[test]
    fn flat_key_value_document_parses() {
        let text = "\
n_particles = 300
sigma = 0.5
eps_rf = false
eps_bm = true
ou_mode = \"exact\"
";
        let cfg = SimConfig::from_toml(text).unwrap();
        assert_eq!(cfg.n_particles, 300);
        assert_eq!(cfg.sigma, 0.5);
        assert_eq!(cfg.ou_mode, OuMode::Exact);
        // untouched keys keep defaults
        assert_eq!(cfg.max_epochs, 3000);
    }
}
