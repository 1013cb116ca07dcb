//! Periodic square domain, droplet state, and sphere volume/radius
//! conversions.
//!
//! All coordinates are stored wrapped into `[-half_width, half_width)` at
//! all times; distances and field evaluations go through the minimal image.

use crate::error::{Result, SimError};
use crate::vec2::Vec2;

use std::f64::consts::PI;

/// The periodic square `[-half_width, half_width)^2` (a flat torus).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    half_width: f64,
}

impl Domain {
    /// Square torus with the given half-width. Panics if not positive.
    pub fn square(half_width: f64) -> Self {
        assert!(
            half_width > 0.0 && half_width.is_finite(),
            "domain half-width must be positive and finite, got {half_width}"
        );
        Domain { half_width }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Full side length of the square.
    pub fn side(&self) -> f64 {
        2.0 * self.half_width
    }

    /// The domain is always periodic.
    pub fn is_periodic(&self) -> bool {
        true
    }

    fn wrap_coord(&self, x: f64) -> f64 {
        // identity on in-range coordinates, so a zero displacement leaves
        // a position bit-identical
        if (-self.half_width..self.half_width).contains(&x) {
            return x;
        }
        let l = self.side();
        let w = (x + self.half_width).rem_euclid(l) - self.half_width;
        // rem_euclid can land exactly on the upper boundary when x is a
        // hair below a period multiple
        if w >= self.half_width {
            -self.half_width
        } else {
            w
        }
    }

    /// Map a point into `[-half_width, half_width)^2` by modular reduction.
    /// Total and idempotent.
    pub fn wrap(&self, p: Vec2) -> Vec2 {
        Vec2::new(self.wrap_coord(p.x), self.wrap_coord(p.y))
    }

    fn min_image_coord(&self, d: f64) -> f64 {
        let l = self.side();
        d - l * (d / l).round()
    }

    /// Representative of `b - a` with the smallest Euclidean norm among
    /// periodic images. The norm is at most `half_width * sqrt(2)`.
    pub fn min_image(&self, a: Vec2, b: Vec2) -> Vec2 {
        let d = b - a;
        Vec2::new(self.min_image_coord(d.x), self.min_image_coord(d.y))
    }

    /// Minimal-image Euclidean distance between two points.
    pub fn distance(&self, a: Vec2, b: Vec2) -> f64 {
        self.min_image(a, b).norm()
    }
}

/// One droplet: stable id, wrapped position, volume, and alive flag.
///
/// Removed droplets keep their slot with `volume = 0` and `alive = false`
/// and are never revived, so the initial population size stays readable
/// from the slice length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub id: u64,
    pub pos: Vec2,
    pub volume: f64,
    pub alive: bool,
}

impl Particle {
    pub fn new(id: u64, pos: Vec2, volume: f64) -> Self {
        Particle {
            id,
            pos,
            volume,
            alive: true,
        }
    }

    /// Radius of the equivalent sphere. Alive particles have volume > 0.
    pub fn radius(&self) -> f64 {
        sphere_radius(self.volume)
    }
}

/// Radius of a sphere of volume `v` (no validation; `v >= 0` assumed).
pub(crate) fn sphere_radius(v: f64) -> f64 {
    (v * (3.0 / (4.0 * PI))).cbrt()
}

/// Radius of a sphere of volume `v`: `(3 v / 4 pi)^(1/3)`.
///
/// Strictly increasing; inverse of [`volume_from_radius`]. Negative input
/// is an invalid state.
pub fn radius_from_volume(v: f64) -> Result<f64> {
    if v < 0.0 || v.is_nan() {
        return Err(SimError::Config(format!(
            "volume must be nonnegative, got {v}"
        )));
    }
    Ok(sphere_radius(v))
}

/// Volume of a sphere of radius `r`: `(4/3) pi r^3`.
pub fn volume_from_radius(r: f64) -> f64 {
    (4.0 / 3.0) * PI * r * r * r
}
