//! Forward and inverse mapping between screen space and the log-polar (LP)
//! shading buffer.
//!
//! Screen positions are continuous pixel coordinates (pixel `i` spans
//! `[i, i+1)`), `y` grows downwards and the polar angle `θ` is measured in
//! degrees from `+x` around the gaze point, remapped to `[0, 360)`.
//!
//! The LP coordinates depend only on eccentricity and angle, never on the
//! display resolution or the gaze position; that is what keeps the buffer a
//! constant size.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::acuity::{AcuityConfig, AcuityModel};
use crate::error::{Result, VafrError};

/// Converts camera intrinsics into the per-pixel ratio `c_r`, so that
/// `tan(e) = c_r · r` for a pixel at distance `r` from the optical axis.
pub fn compute_cr(film_height_mm: f64, focal_length_mm: f64, display_height_px: f64) -> Result<f64> {
    for (name, v) in [
        ("film height", film_height_mm),
        ("focal length", focal_length_mm),
        ("display height", display_height_px),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(VafrError::domain(
                "compute_cr",
                format!("{name} must be positive, got {v}"),
            ));
        }
    }
    Ok(film_height_mm / focal_length_mm / display_height_px)
}

/// Tangential-to-radial shading-rate ratio `Δ(e)`.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaSpec {
    Constant(f64),
    /// `(eccentricity °, ratio)` pairs, linearly interpolated and clamped
    /// at both ends.
    Table(Vec<(f64, f64)>),
}

impl Default for DeltaSpec {
    fn default() -> Self {
        DeltaSpec::Constant(1.0)
    }
}

impl DeltaSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match self {
            DeltaSpec::Constant(v) if ok(*v) => Ok(()),
            DeltaSpec::Constant(v) => Err(VafrError::invalid(
                "delta",
                format!("ratio must be positive and finite, got {v}"),
            )),
            DeltaSpec::Table(rows) => {
                if rows.is_empty() {
                    return Err(VafrError::invalid("delta", "table is empty"));
                }
                for (i, &(e, d)) in rows.iter().enumerate() {
                    if !e.is_finite() || !ok(d) {
                        return Err(VafrError::invalid(
                            "delta",
                            format!("row {i}: ratio must be positive and finite"),
                        ));
                    }
                    if i > 0 && e <= rows[i - 1].0 {
                        return Err(VafrError::invalid(
                            "delta",
                            format!("row {i}: eccentricities must strictly increase"),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    #[inline]
    pub fn eval(&self, e: f64) -> f64 {
        match self {
            DeltaSpec::Constant(v) => *v,
            DeltaSpec::Table(rows) => {
                let i = rows.partition_point(|r| r.0 <= e);
                if i == 0 {
                    rows[0].1
                } else if i == rows.len() {
                    rows[rows.len() - 1].1
                } else {
                    let (e0, d0) = rows[i - 1];
                    let (e1, d1) = rows[i];
                    d0 + (d1 - d0) * (e - e0) / (e1 - e0)
                }
            }
        }
    }
}

impl fmt::Display for DeltaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaSpec::Constant(v) => write!(f, "constant:{v}"),
            DeltaSpec::Table(rows) => {
                let parts: Vec<String> = rows.iter().map(|(e, d)| format!("{e}:{d}")).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

impl std::str::FromStr for DeltaSpec {
    type Err = VafrError;

    /// Accepts `constant:<ratio>`, a bare number, or
    /// `table:<e>:<ratio>,<e>:<ratio>,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || VafrError::invalid("delta", format!("cannot parse {s:?}"));
        let spec = if let Some(rest) = s.strip_prefix("constant:") {
            DeltaSpec::Constant(rest.trim().parse().map_err(|_| bad())?)
        } else if let Some(rest) = s.strip_prefix("table:") {
            let mut rows = Vec::new();
            for item in rest.split(',') {
                let (e, d) = item.split_once(':').ok_or_else(bad)?;
                rows.push((
                    e.trim().parse().map_err(|_| bad())?,
                    d.trim().parse().map_err(|_| bad())?,
                ));
            }
            DeltaSpec::Table(rows)
        } else {
            DeltaSpec::Constant(s.trim().parse().map_err(|_| bad())?)
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DeltaRepr {
    Text(String),
    Table(Vec<[f64; 2]>),
}

impl Serialize for DeltaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DeltaSpec::Constant(_) => DeltaRepr::Text(self.to_string()).serialize(s),
            DeltaSpec::Table(rows) => {
                DeltaRepr::Table(rows.iter().map(|&(e, d)| [e, d]).collect()).serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for DeltaSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = match DeltaRepr::deserialize(d)? {
            DeltaRepr::Text(s) => s.parse().map_err(serde::de::Error::custom)?,
            DeltaRepr::Table(rows) => DeltaSpec::Table(rows.into_iter().map(|r| (r[0], r[1])).collect()),
        };
        spec.validate().map_err(serde::de::Error::custom)?;
        Ok(spec)
    }
}

/// Shading height `l(e) = Δ(e)·360·sin(2e)/ω(e)` for `e ∈ [0, e_max]`.
#[inline]
pub(crate) fn shading_height_raw(model: &AcuityModel, delta: &DeltaSpec, e: f64) -> f64 {
    delta.eval(e) * 360.0 * (2.0 * e).to_radians().sin() / model.mar_unchecked(e)
}

/// Result of [`derive_buffer_dims`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BufferDims {
    pub lp_w: usize,
    pub lp_h: usize,
    /// `u(e_max)` before rounding up.
    pub u_max: f64,
    /// Maximum shading height before rounding up.
    pub l_max: f64,
    /// Eccentricity at which the shading height peaks.
    pub e_at_l_max: f64,
}

/// Grid spacing for the coarse shading-height scan, degrees.
const HEIGHT_SCAN_STEP: f64 = 1e-3;
/// Final bracket width of the ternary refinement, degrees.
const HEIGHT_REFINE_TOL: f64 = 1e-6;

/// LP buffer dimensions for a model and anisotropy ratio. No display or
/// gaze term enters, so the result is the same for every screen.
pub fn derive_buffer_dims(model: &AcuityModel, delta: &DeltaSpec) -> BufferDims {
    let u_max = model.u_max();
    let e_max = model.e_max();
    let height = |e: f64| shading_height_raw(model, delta, e);

    let steps = (e_max / HEIGHT_SCAN_STEP).ceil() as usize;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..steps {
        let l = height(i as f64 * HEIGHT_SCAN_STEP);
        if l > best {
            best = l;
            best_i = i;
        }
    }
    let mut lo = (best_i as f64 - 1.0).max(0.0) * HEIGHT_SCAN_STEP;
    let mut hi = ((best_i + 1) as f64 * HEIGHT_SCAN_STEP).min(e_max);
    while hi - lo > HEIGHT_REFINE_TOL {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if height(a) < height(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let mut e_at = 0.5 * (lo + hi);
    let mut l_max = height(e_at);
    let grid_pt = best_i as f64 * HEIGHT_SCAN_STEP;
    if best > l_max {
        e_at = grid_pt;
        l_max = best;
    }

    BufferDims {
        lp_w: u_max.ceil() as usize,
        lp_h: l_max.ceil() as usize,
        u_max,
        l_max,
        e_at_l_max: e_at,
    }
}

/// A screen point resolved into eccentricity and polar angle around the gaze.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar {
    /// Eccentricity in degrees.
    pub e: f64,
    /// Polar angle in degrees, `[0, 360)`.
    pub theta: f64,
}

/// Outcome of [`MappingContext::forward`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Forward {
    Inside { u: f64, v: f64 },
    /// Eccentricity at or beyond `e_max`; carries the polar position so the
    /// caller can apply its own fill policy.
    Outside(Polar),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingContext {
    model: AcuityModel,
    c_r: f64,
    display_w: u32,
    display_h: u32,
    gaze: (f64, f64),
    delta: DeltaSpec,
    dims: BufferDims,
}

impl MappingContext {
    pub fn new(
        model: AcuityModel,
        c_r: f64,
        display: (u32, u32),
        gaze: (f64, f64),
        delta: DeltaSpec,
    ) -> Result<Self> {
        if !(c_r.is_finite() && c_r > 0.0) {
            return Err(VafrError::invalid("mapping context", format!("c_r must be positive, got {c_r}")));
        }
        if display.0 == 0 || display.1 == 0 {
            return Err(VafrError::invalid("mapping context", "display dimensions must be at least 1"));
        }
        delta.validate()?;
        let dims = derive_buffer_dims(&model, &delta);
        let ctx = MappingContext {
            model,
            c_r,
            display_w: display.0,
            display_h: display.1,
            gaze: (0.0, 0.0),
            delta,
            dims,
        };
        ctx.with_gaze(gaze)
    }

    /// Default acuity model, `Δ ≡ 1`, gaze at the display centre and
    /// `c_r = 1 / display_h` (film height equal to focal length).
    pub fn for_display(width: u32, height: u32) -> Result<Self> {
        MappingContext::new(
            AcuityModel::default(),
            1.0 / f64::from(height.max(1)),
            (width, height),
            (f64::from(width) / 2.0, f64::from(height) / 2.0),
            DeltaSpec::default(),
        )
    }

    /// Same context with a different gaze point. Buffer dimensions do not
    /// depend on gaze, so nothing is recomputed.
    pub fn with_gaze(mut self, gaze: (f64, f64)) -> Result<Self> {
        let (x, y) = gaze;
        let (w, h) = (f64::from(self.display_w), f64::from(self.display_h));
        if !(x >= 0.0 && x <= w && y >= 0.0 && y <= h) {
            return Err(VafrError::invalid(
                "gaze",
                format!("({x}, {y}) lies outside the {w}x{h} display"),
            ));
        }
        self.gaze = gaze;
        Ok(self)
    }

    pub fn model(&self) -> &AcuityModel {
        &self.model
    }
    pub fn c_r(&self) -> f64 {
        self.c_r
    }
    pub fn display(&self) -> (u32, u32) {
        (self.display_w, self.display_h)
    }
    pub fn gaze(&self) -> (f64, f64) {
        self.gaze
    }
    pub fn delta(&self) -> &DeltaSpec {
        &self.delta
    }
    pub fn dims(&self) -> BufferDims {
        self.dims
    }
    pub fn lp_w(&self) -> usize {
        self.dims.lp_w
    }
    pub fn lp_h(&self) -> usize {
        self.dims.lp_h
    }
    pub fn e_max(&self) -> f64 {
        self.model.e_max()
    }
    pub fn u_max(&self) -> f64 {
        self.dims.u_max
    }

    fn check_e(&self, op: &'static str, e: f64) -> Result<()> {
        if e >= 0.0 && e < self.e_max() {
            Ok(())
        } else {
            Err(VafrError::domain(op, format!("eccentricity {e} outside [0, {})", self.e_max())))
        }
    }

    /// Eccentricity (degrees) of a point `r` pixels from the gaze.
    pub fn ecc_from_radius(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(VafrError::domain("ecc_from_radius", format!("radius {r} is negative")));
        }
        Ok((self.c_r * r).atan().to_degrees())
    }

    /// Pixel distance from the gaze of a point at eccentricity `e`.
    pub fn radius_from_ecc(&self, e: f64) -> Result<f64> {
        if !(e >= 0.0 && e < 90.0) {
            return Err(VafrError::domain("radius_from_ecc", format!("eccentricity {e} outside [0, 90)")));
        }
        Ok(self.radius_unchecked(e))
    }

    #[inline]
    pub(crate) fn radius_unchecked(&self, e: f64) -> f64 {
        e.to_radians().tan() / self.c_r
    }

    /// Radial LP coordinate: `u(e) = ∫₀ᵉ 2 f(t) dt`.
    pub fn u_of_e(&self, e: f64) -> Result<f64> {
        self.check_e("u_of_e", e)?;
        Ok(self.model.u_unchecked(e))
    }

    pub fn e_of_u(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0 && u <= self.u_max()) {
            return Err(VafrError::domain("e_of_u", format!("u {u} outside [0, {}]", self.u_max())));
        }
        Ok(self.model.e_unchecked(u))
    }

    /// Number of LP rows covering a full revolution at eccentricity `e`.
    pub fn shading_height(&self, e: f64) -> Result<f64> {
        self.check_e("shading_height", e)?;
        Ok(self.shading_height_unchecked(e))
    }

    #[inline]
    pub(crate) fn shading_height_unchecked(&self, e: f64) -> f64 {
        shading_height_raw(&self.model, &self.delta, e)
    }

    /// Angular LP coordinate: `v(e, θ) = Δ(e)·θ·sin(2e)/ω(e)`.
    pub fn v_of(&self, e: f64, theta: f64) -> Result<f64> {
        self.check_e("v_of", e)?;
        if !(theta >= 0.0 && theta < 360.0) {
            return Err(VafrError::domain("v_of", format!("angle {theta} outside [0, 360)")));
        }
        Ok(theta / 360.0 * self.shading_height_unchecked(e))
    }

    /// Resolves a screen point into eccentricity and angle around the gaze.
    /// Defined for any finite point, on or off the display.
    #[inline]
    pub fn polar(&self, x: f64, y: f64) -> Polar {
        let dx = x - self.gaze.0;
        let dy = y - self.gaze.1;
        let r = dx.hypot(dy);
        let e = (self.c_r * r).atan().to_degrees();
        let mut theta = dy.atan2(dx).to_degrees();
        if theta < 0.0 {
            theta += 360.0;
        }
        if theta >= 360.0 {
            theta -= 360.0;
        }
        Polar { e, theta }
    }

    /// Maps a screen point into the LP buffer.
    pub fn forward(&self, x: f64, y: f64) -> Result<Forward> {
        let (w, h) = (f64::from(self.display_w), f64::from(self.display_h));
        if !(x >= 0.0 && x <= w && y >= 0.0 && y <= h) {
            return Err(VafrError::domain("forward", format!("({x}, {y}) outside the {w}x{h} display")));
        }
        let p = self.polar(x, y);
        if p.e >= self.e_max() {
            return Ok(Forward::Outside(p));
        }
        let u = self.model.u_unchecked(p.e);
        let v = p.theta / 360.0 * self.shading_height_unchecked(p.e);
        Ok(Forward::Inside { u, v })
    }

    /// Maps an LP position back to the screen.
    pub fn inverse(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        let e = self.e_of_u(u)?;
        let l = self.shading_height_unchecked(e);
        if !(v >= 0.0 && v <= l) {
            return Err(VafrError::domain("inverse", format!("v {v} outside the column height {l} at u {u}")));
        }
        let theta = if l > 0.0 { 360.0 * v / l } else { 0.0 };
        Ok(self.screen_from_polar(e, theta))
    }

    #[inline]
    pub(crate) fn screen_from_polar(&self, e: f64, theta_deg: f64) -> (f64, f64) {
        let r = self.radius_unchecked(e);
        let (s, c) = theta_deg.to_radians().sin_cos();
        (r * c + self.gaze.0, r * s + self.gaze.1)
    }
}

/// Serializable description of a [`MappingContext`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextConfig {
    /// Path to an acuity JSON file, or inline pivots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelRef>,
    #[serde(flatten)]
    pub camera: CameraRatio,
    pub display: [u32; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaze: Option<[f64; 2]>,
    #[serde(default)]
    pub delta: DeltaSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Path(String),
    Inline(AcuityConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CameraRatio {
    Ratio { c_r: f64 },
    Intrinsics { film_height_mm: f64, focal_length_mm: f64 },
}

impl CameraRatio {
    pub fn c_r(&self, display_h: u32) -> Result<f64> {
        match *self {
            CameraRatio::Ratio { c_r } => Ok(c_r),
            CameraRatio::Intrinsics { film_height_mm, focal_length_mm } => {
                compute_cr(film_height_mm, focal_length_mm, f64::from(display_h))
            }
        }
    }
}

impl ContextConfig {
    pub fn build(&self, base_dir: Option<&std::path::Path>) -> Result<MappingContext> {
        let model = match &self.model {
            None => AcuityModel::default(),
            Some(ModelRef::Inline(cfg)) => AcuityModel::from_config(cfg)?,
            Some(ModelRef::Path(p)) => {
                let path = match base_dir {
                    Some(dir) => dir.join(p),
                    None => p.into(),
                };
                let text = std::fs::read_to_string(&path).map_err(|source| VafrError::Io { path, source })?;
                AcuityModel::from_json(&text)?
            }
        };
        let [w, h] = self.display;
        let gaze = self.gaze.map(|g| (g[0], g[1])).unwrap_or((f64::from(w) / 2.0, f64::from(h) / 2.0));
        MappingContext::new(model, self.camera.c_r(h)?, (w, h), gaze, self.delta.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> MappingContext {
        MappingContext::for_display(1920, 1080).unwrap()
    }

    #[test]
    fn cr_examples() {
        assert_eq!(compute_cr(24.0, 24.0, 1080.0).unwrap(), 1.0 / 1080.0);
        assert!((compute_cr(36.0, 18.0, 2160.0).unwrap() - 2.0 / 2160.0).abs() < 1e-18);
        assert!(compute_cr(0.0, 24.0, 1080.0).is_err());
        assert!(compute_cr(24.0, -1.0, 1080.0).is_err());
    }

    #[test]
    fn eccentricity_radius_pair() {
        let c = ctx();
        assert_eq!(c.ecc_from_radius(0.0).unwrap(), 0.0);
        assert!((c.ecc_from_radius(540.0).unwrap() - 0.5f64.atan().to_degrees()).abs() < 1e-12);
        assert!((c.ecc_from_radius(1080.0).unwrap() - 45.0).abs() < 1e-12);
        assert!((c.radius_from_ecc(45.0).unwrap() - 1080.0).abs() < 1e-9);
        assert!((c.radius_from_ecc(60.0).unwrap() - 1080.0 * 3f64.sqrt()).abs() < 1e-9);
        assert!(c.radius_from_ecc(90.0).is_err());
        assert!(c.ecc_from_radius(-1.0).is_err());
        for r in [0.5, 3.0, 100.0, 1234.5] {
            let back = c.radius_from_ecc(c.ecc_from_radius(r).unwrap()).unwrap();
            assert!((back - r).abs() <= 1e-9 * r);
        }
    }

    #[test]
    fn shading_height_examples() {
        let c = ctx();
        assert_eq!(c.shading_height(0.0).unwrap(), 0.0);
        assert!((c.shading_height(45.0).unwrap() - 1600.0).abs() < 1e-9);
        let v = c.v_of(30.0, 90.0).unwrap();
        assert!((v - 90.0 * 60f64.to_radians().sin() / 0.2).abs() < 1e-9);
        assert!((c.v_of(30.0, 180.0).unwrap() - c.shading_height(30.0).unwrap() / 2.0).abs() < 1e-12);
        assert_eq!(c.v_of(12.0, 0.0).unwrap(), 0.0);
        assert!(c.v_of(12.0, 360.0).is_err());
        assert!(c.shading_height(60.0).is_err());
    }

    /// Root of `tan 2e = π·ω(e)/(90·m)` on (0, 45) by bisection.
    fn stationary_point(m: f64, omega0: f64) -> f64 {
        let g = |e: f64| (2.0 * e).to_radians().tan() - std::f64::consts::PI * (m * e + omega0) / (90.0 * m);
        let (mut lo, mut hi) = (1e-9, 45.0 - 1e-9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn single_segment_height_peak_is_stationary_point() {
        let model = AcuityModel::from_pivots(&[(0.0, 40.0), (60.0, 4.0)], 60.0).unwrap();
        let dims = derive_buffer_dims(&model, &DeltaSpec::default());
        let seg = &model.segments()[0];
        assert!((dims.e_at_l_max - stationary_point(seg.m, seg.omega)).abs() < 1e-4);
    }

    #[test]
    fn shallow_single_segment_peaks_near_45() {
        let model = AcuityModel::from_pivots(&[(0.0, 5.0), (60.0, 4.0)], 60.0).unwrap();
        let dims = derive_buffer_dims(&model, &DeltaSpec::default());
        assert!((dims.e_at_l_max - 45.0).abs() < 3.0, "{}", dims.e_at_l_max);
    }

    #[test]
    fn forward_examples() {
        let c = ctx();
        let (gx, gy) = c.gaze();
        assert_eq!(c.forward(gx, gy).unwrap(), Forward::Inside { u: 0.0, v: 0.0 });
        let r45 = c.radius_from_ecc(45.0).unwrap();
        // 45° due +x lies off a 1080p display; use a wider one
        let wide = MappingContext::for_display(4000, 1080).unwrap();
        let (wx, wy) = wide.gaze();
        match wide.forward(wx + r45, wy).unwrap() {
            Forward::Inside { u, v } => {
                assert!((u - wide.u_of_e(45.0).unwrap()).abs() < 1e-9);
                assert_eq!(v, 0.0);
            }
            other => panic!("{other:?}"),
        }
        let r61 = c.radius_from_ecc(61.0).unwrap();
        let far = MappingContext::for_display(8000, 1080).unwrap();
        let (fx, fy) = far.gaze();
        assert!(matches!(far.forward(fx + r61, fy).unwrap(), Forward::Outside(_)));
        assert!(c.forward(-1.0, 0.0).is_err());
    }

    #[test]
    fn inverse_examples() {
        let c = ctx();
        let (gx, gy) = c.gaze();
        let (x, y) = c.inverse(0.0, 0.0).unwrap();
        assert_eq!((x, y), (gx, gy));
        let u = c.u_of_e(45.0).unwrap();
        let l = c.shading_height(45.0).unwrap();
        let (x, y) = c.inverse(u, l / 4.0).unwrap();
        assert!((x - gx).abs() < 1e-6);
        assert!((y - (gy + 1080.0)).abs() < 1e-6);
        assert!(c.inverse(u, l + 1.0).is_err());
        assert!(c.inverse(c.u_max() + 1.0, 0.0).is_err());
    }

    #[test]
    fn e_of_u_at_segment_boundaries() {
        let c = ctx();
        for (i, pivot) in [10.0, 20.0, 30.0].into_iter().enumerate() {
            let segs = c.model().segments();
            let left = &segs[i];
            let right = &segs[i + 1];
            let u = left.u(pivot);
            assert!((left.e(u) - pivot).abs() < 1e-9);
            assert!((right.e(u) - pivot).abs() < 1e-9);
            assert!((c.e_of_u(u).unwrap() - pivot).abs() < 1e-9);
        }
        let u = c.u_of_e(17.3).unwrap();
        assert!((c.e_of_u(u).unwrap() - 17.3).abs() < 1e-9);
    }

    #[test]
    fn default_dims() {
        let dims = ctx().dims();
        assert_eq!((dims.lp_w, dims.lp_h), (901, 1638));
        assert!(dims.u_max > 900.0 && dims.u_max < 900.2);
    }

    #[test]
    fn gaze_outside_display_rejected() {
        assert!(ctx().with_gaze((1921.0, 0.0)).is_err());
        assert!(ctx().with_gaze((1920.0, 1080.0)).is_ok());
    }

    #[test]
    fn delta_parsing() {
        assert_eq!("constant:1.0".parse::<DeltaSpec>().unwrap(), DeltaSpec::Constant(1.0));
        assert_eq!("0.5".parse::<DeltaSpec>().unwrap(), DeltaSpec::Constant(0.5));
        let t: DeltaSpec = "table:0:1,30:0.5".parse().unwrap();
        assert!((t.eval(15.0) - 0.75).abs() < 1e-12);
        assert_eq!(t.eval(50.0), 0.5);
        assert!("constant:-1".parse::<DeltaSpec>().is_err());
        assert!("table:10:1,5:1".parse::<DeltaSpec>().is_err());
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<DeltaSpec>(&json).unwrap(), t);
        assert_eq!(serde_json::from_str::<DeltaSpec>("\"constant:1.0\"").unwrap(), DeltaSpec::Constant(1.0));
    }

    #[test]
    fn context_config_json() {
        let cfg: ContextConfig = serde_json::from_str(
            r#"{"film_height_mm": 24, "focal_length_mm": 24, "display": [1920, 1080], "delta": "constant:1.0"}"#,
        )
        .unwrap();
        let c = cfg.build(None).unwrap();
        assert_eq!(c.c_r(), 1.0 / 1080.0);
        assert_eq!(c.gaze(), (960.0, 540.0));
        let cfg: ContextConfig = serde_json::from_str(
            r#"{"model": {"pivots": [[0, 20], [60, 4]]}, "c_r": 0.001, "display": [800, 600], "gaze": [0, 0]}"#,
        )
        .unwrap();
        let c = cfg.build(None).unwrap();
        assert_eq!(c.model().pivots().len(), 2);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ContextConfig>(&text).unwrap(), cfg);
    }
}
