//! Pinhole camera whose per-pixel ratio matches the mapping's `c_r`.

use serde::{Deserialize, Serialize};

use super::scene::Ray;
use super::vec3::Vec3;
use crate::error::{Result, VafrError};
use crate::mapping::compute_cr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    position: Vec3,
    right: Vec3,
    up: Vec3,
    forward: Vec3,
    film_height_mm: f64,
    focal_length_mm: f64,
    width: u32,
    height: u32,
    c_r: f64,
}

impl Camera {
    /// `right`, `up`, `forward` must be orthonormal within 1e-9. Screen `y`
    /// grows downwards, opposite to `up`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        position: Vec3,
        right: Vec3,
        up: Vec3,
        forward: Vec3,
        film_height_mm: f64,
        focal_length_mm: f64,
        width: u32,
        height: u32,
    ) -> Result<Self> {
        const TOL: f64 = 1e-9;
        let unit = |v: Vec3| (v.length() - 1.0).abs() <= TOL;
        if !(unit(right) && unit(up) && unit(forward))
            || right.dot(up).abs() > TOL
            || right.dot(forward).abs() > TOL
            || up.dot(forward).abs() > TOL
        {
            return Err(VafrError::invalid("camera", "right/up/forward must be orthonormal"));
        }
        if width == 0 || height == 0 {
            return Err(VafrError::invalid("camera", "display dimensions must be at least 1"));
        }
        let c_r = compute_cr(film_height_mm, focal_length_mm, f64::from(height))
            .map_err(|e| VafrError::invalid("camera", e.to_string()))?;
        Ok(Camera { position, right, up, forward, film_height_mm, focal_length_mm, width, height, c_r })
    }

    /// Camera at `position` looking at `target`; `up_hint` fixes the roll.
    pub fn look_at(
        position: Vec3,
        target: Vec3,
        up_hint: Vec3,
        film_height_mm: f64,
        focal_length_mm: f64,
        (width, height): (u32, u32),
    ) -> Result<Self> {
        let forward = (target - position).normalized();
        let right = up_hint.cross(forward);
        if !(right.length() > 1e-12) || !forward.is_finite() {
            return Err(VafrError::invalid("camera", "view direction is degenerate or parallel to up"));
        }
        // left-handed basis: right = up × forward
        let right = right.normalized();
        let up = forward.cross(right);
        Camera::new(position, right, up, forward, film_height_mm, focal_length_mm, width, height)
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }
    pub fn forward(&self) -> Vec3 {
        self.forward
    }
    pub fn film_height_mm(&self) -> f64 {
        self.film_height_mm
    }
    pub fn focal_length_mm(&self) -> f64 {
        self.focal_length_mm
    }
    pub fn display(&self) -> (u32, u32) {
        (self.width, self.height)
    }
    pub fn c_r(&self) -> f64 {
        self.c_r
    }

    /// Ray through continuous screen position `(x, y)` in pixels.
    #[inline]
    pub fn generate_ray(&self, x: f64, y: f64) -> Ray {
        let dx = (x - f64::from(self.width) / 2.0) * self.c_r;
        let dy = (y - f64::from(self.height) / 2.0) * self.c_r;
        let dir = (self.forward + self.right * dx - self.up * dy).normalized();
        Ray { origin: self.position, dir }
    }
}

/// Serializable look-at camera; the display size is supplied at render time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    pub position: Vec3,
    pub look_at: Vec3,
    #[serde(default = "default_up")]
    pub up: Vec3,
    pub film_height_mm: f64,
    pub focal_length_mm: f64,
}

fn default_up() -> Vec3 {
    Vec3::new(0.0, 1.0, 0.0)
}

impl CameraSpec {
    pub fn build(&self, display: (u32, u32)) -> Result<Camera> {
        Camera::look_at(self.position, self.look_at, self.up, self.film_height_mm, self.focal_length_mm, display)
    }
}
