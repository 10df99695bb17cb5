//! Scene description, ray intersection and shading.

use serde::{Deserialize, Serialize};

use super::vec3::Vec3;
use crate::error::{Result, VafrError};

/// Offset along the normal for shadow-ray origins, metres.
const SHADOW_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    /// Unit length.
    pub dir: Vec3,
}

impl Ray {
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Diffuse reflectance, RGB in [0, 1].
    pub albedo: [f64; 3],
    #[serde(default)]
    pub specular: f64,
    #[serde(default = "default_shininess")]
    pub shininess: f64,
}

fn default_shininess() -> f64 {
    32.0
}

impl Material {
    pub fn diffuse(albedo: [f64; 3]) -> Self {
        Material { albedo, specular: 0.0, shininess: default_shininess() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
    pub material: Material,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub vertices: [Vec3; 3],
    pub material: Material,
}

/// Radiant intensity falls off with the squared distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointLight {
    pub position: Vec3,
    pub intensity: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalLight {
    /// Direction the light travels in.
    pub direction: Vec3,
    pub intensity: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scene {
    #[serde(default)]
    pub spheres: Vec<Sphere>,
    #[serde(default)]
    pub triangles: Vec<Triangle>,
    #[serde(default)]
    pub point_lights: Vec<PointLight>,
    #[serde(default)]
    pub directional_lights: Vec<DirectionalLight>,
    #[serde(default)]
    pub background: [f64; 3],
    #[serde(default)]
    pub ambient: [f64; 3],
}

#[derive(Debug, Clone, Copy)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
    /// Unit normal facing the incoming ray.
    pub normal: Vec3,
    pub material: Material,
}

impl Sphere {
    fn intersect(&self, ray: &Ray, t_max: f64) -> Option<f64> {
        let oc = ray.origin - self.center;
        let b = oc.dot(ray.dir);
        let c = oc.dot(oc) - self.radius * self.radius;
        let disc = b * b - c;
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        // closest root in front of the origin
        [-b - s, -b + s].into_iter().find(|&t| t > 0.0 && t < t_max)
    }
}

impl Triangle {
    fn normal(&self) -> Vec3 {
        let [a, b, c] = self.vertices;
        (b - a).cross(c - a).normalized()
    }

    /// Möller–Trumbore.
    fn intersect(&self, ray: &Ray, t_max: f64) -> Option<f64> {
        let [a, b, c] = self.vertices;
        let e1 = b - a;
        let e2 = c - a;
        let p = ray.dir.cross(e2);
        let det = e1.dot(p);
        if det.abs() < 1e-12 {
            return None;
        }
        let inv = 1.0 / det;
        let s = ray.origin - a;
        let u = s.dot(p) * inv;
        if !(0.0..=1.0).contains(&u) {
            return None;
        }
        let q = s.cross(e1);
        let v = ray.dir.dot(q) * inv;
        if v < 0.0 || u + v > 1.0 {
            return None;
        }
        let t = e2.dot(q) * inv;
        (t > 0.0 && t < t_max).then_some(t)
    }
}

fn rgb(a: [f64; 3]) -> Vec3 {
    Vec3::from(a)
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        let bad = |d: String| Err(VafrError::invalid("scene", d));
        for (i, s) in self.spheres.iter().enumerate() {
            if !(s.radius > 0.0) || !s.center.is_finite() {
                return bad(format!("sphere {i}: radius must be positive, got {}", s.radius));
            }
        }
        for (i, t) in self.triangles.iter().enumerate() {
            let [a, b, c] = t.vertices;
            if !((b - a).cross(c - a).length() > 1e-12) {
                return bad(format!("triangle {i}: vertices are collinear"));
            }
        }
        for (i, l) in self.directional_lights.iter().enumerate() {
            if !(l.direction.length() > 0.0) {
                return bad(format!("directional light {i}: zero direction"));
            }
        }
        if self.point_lights.is_empty() && self.directional_lights.is_empty() {
            return bad("at least one light is required".into());
        }
        Ok(())
    }

    pub fn light_count(&self) -> usize {
        self.point_lights.len() + self.directional_lights.len()
    }

    /// Closest hit with `t < t_max`.
    pub fn intersect(&self, ray: &Ray, t_max: f64) -> Option<Hit> {
        let mut best: Option<(f64, Vec3, Material)> = None;
        let mut limit = t_max;
        for s in &self.spheres {
            if let Some(t) = s.intersect(ray, limit) {
                limit = t;
                best = Some((t, (ray.at(t) - s.center) / s.radius, s.material));
            }
        }
        for tri in &self.triangles {
            if let Some(t) = tri.intersect(ray, limit) {
                limit = t;
                best = Some((t, tri.normal(), tri.material));
            }
        }
        best.map(|(t, n, material)| {
            let normal = if n.dot(ray.dir) > 0.0 { -n } else { n };
            Hit { t, point: ray.at(t), normal, material }
        })
    }

    fn occluded(&self, ray: &Ray, t_max: f64) -> bool {
        self.spheres.iter().any(|s| s.intersect(ray, t_max).is_some())
            || self.triangles.iter().any(|t| t.intersect(ray, t_max).is_some())
    }

    /// Radiance along `ray`: ambient + Lambert + Blinn-Phong per light with
    /// hard shadows. Returns the colour and the number of shadow rays cast.
    pub fn shade(&self, ray: &Ray) -> ([f64; 3], u64) {
        let Some(hit) = self.intersect(ray, f64::INFINITY) else {
            return (self.background, 0);
        };
        let albedo = rgb(hit.material.albedo);
        let mut color = rgb(self.ambient).mul_elem(albedo);
        let mut shadow_rays = 0;
        let origin = hit.point + hit.normal * SHADOW_EPS;
        let view = -ray.dir;

        let mut add_light = |to_light: Vec3, dist: f64, radiance: Vec3| {
            let ndotl = hit.normal.dot(to_light);
            if ndotl <= 0.0 {
                return;
            }
            shadow_rays += 1;
            if self.occluded(&Ray { origin, dir: to_light }, dist) {
                return;
            }
            let half = (to_light + view).normalized();
            let spec = hit.material.specular * hit.normal.dot(half).max(0.0).powf(hit.material.shininess);
            color += radiance.mul_elem(albedo * ndotl + Vec3::new(spec, spec, spec));
        };

        for l in &self.point_lights {
            let d = l.position - hit.point;
            let dist = d.length();
            add_light(d / dist, dist, rgb(l.intensity) / (dist * dist));
        }
        for l in &self.directional_lights {
            add_light(-l.direction.normalized(), f64::INFINITY, rgb(l.intensity));
        }
        (color.into(), shadow_rays)
    }
}
