//! Shading-rate curves of earlier log-polar foveation methods (LMFR, LaFR)
//! and a stepped multi-layer profile, for comparison against acuity.
//!
//! A method mapping `u(e)` gives a radial shading rate of `½·du/de` pixels
//! per degree, i.e. cycles per degree. With `z(e) = ln(tan e / c_r) / ln L`
//! and `LW(e) = w·dz/de = (1/ln L)·wπ/(180·sin e·cos e)`:
//!
//! * LMFR: `u = w·z^K`, so `SR = ½·K·z^(K−1)·LW` (`2z³·LW` for `K = 4`).
//! * LaFR below `e_foveal`: `u = w·(z(1−Fa))^(1/Fa)`.
//! * LaFR above: `u = w·(g^(β/0.7)·(1−U_ef) + U_ef)` with
//!   `g = (2·acos Za − π)/π` and `Za = (1/z − 1/Z_ef)/(1/Z_ef − 1)`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acuity::AcuityModel;
use crate::error::{Result, VafrError};
use crate::lpbuffer::LpLayout;
use crate::mapping::MappingContext;
use crate::presets::Resolution;

/// LaFR foveal boundary in degrees.
pub const LAFR_E_FOVEAL: f64 = 4.89;
/// Upper end of the evaluated eccentricity range.
pub const BASELINE_E_MAX: f64 = 55.0;

/// `2·tan(55°)/H`: a 110° vertical field of view.
pub fn default_baseline_cr(height: u32) -> f64 {
    2.0 * 55f64.to_radians().tan() / f64::from(height)
}

/// `ln` of the largest distance from `gaze` to a display corner.
pub fn l_log_for(width: u32, height: u32, gaze: (f64, f64)) -> f64 {
    let (w, h) = (f64::from(width), f64::from(height));
    let dx = gaze.0.max(w - gaze.0);
    let dy = gaze.1.max(h - gaze.1);
    dx.hypot(dy).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineParams {
    pub width: u32,
    pub height: u32,
    /// Resolution reduction ratio; `w = W/δ`.
    pub delta: f64,
    /// LMFR kernel exponent.
    pub kernel_exponent: f64,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gaze: (f64, f64),
    pub c_r: f64,
    /// LaFR branch boundary, degrees.
    pub e_foveal: f64,
    pub l_log: f64,
}

impl BaselineParams {
    /// Display `width × height`, centred gaze, `δ = 1.8`, `a = 0.85`,
    /// `α = 0.15`, `β = 0.7`, kernel exponent 4.
    pub fn new(width: u32, height: u32) -> Self {
        let gaze = (f64::from(width) / 2.0, f64::from(height) / 2.0);
        BaselineParams {
            width,
            height,
            delta: 1.8,
            kernel_exponent: 4.0,
            a: 0.85,
            alpha: 0.15,
            beta: 0.7,
            gaze,
            c_r: default_baseline_cr(height),
            e_foveal: LAFR_E_FOVEAL,
            l_log: l_log_for(width, height, gaze),
        }
    }

    /// Moves the gaze and recomputes `L_log`.
    pub fn with_gaze(mut self, gaze: (f64, f64)) -> Self {
        self.gaze = gaze;
        self.l_log = l_log_for(self.width, self.height, gaze);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |d: String| Err(VafrError::invalid("baseline parameters", d));
        if self.width == 0 || self.height == 0 {
            return bad("display dimensions must be at least 1".into());
        }
        if !(self.delta > 0.0) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        for (name, v) in [("a", self.a), ("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        if !(self.kernel_exponent >= 1.0) {
            return bad(format!("kernel exponent must be at least 1, got {}", self.kernel_exponent));
        }
        if !(self.c_r > 0.0) {
            return bad(format!("c_r must be positive, got {}", self.c_r));
        }
        if !(self.l_log > 0.0) {
            return bad(format!("L_log must be positive, got {}", self.l_log));
        }
        if !(self.e_foveal > 0.0 && self.e_foveal < BASELINE_E_MAX) {
            return bad(format!("e_foveal must lie in (0, {BASELINE_E_MAX}), got {}", self.e_foveal));
        }
        Ok(())
    }

    fn w(&self) -> f64 {
        f64::from(self.width) / self.delta
    }

    fn z(&self, e: f64) -> f64 {
        (e.to_radians().tan() / self.c_r).ln() / self.l_log
    }

    #[allow(non_snake_case)]
    fn LW(&self, e: f64) -> f64 {
        let (s, c) = e.to_radians().sin_cos();
        self.w() * std::f64::consts::PI / (180.0 * s * c) / self.l_log
    }

    /// `z` at `e`, failing outside `(0, 1]`.
    fn z_checked(&self, op: &'static str, e: f64) -> Result<f64> {
        let z = self.z(e);
        if !(z > 0.0 && z <= 1.0) {
            return Err(VafrError::domain(op, format!("z({e}) = {z} outside (0, 1]")));
        }
        Ok(z)
    }

    fn check_range(&self, op: &'static str, e: f64) -> Result<()> {
        self.validate()?;
        if !(e > 0.0 && e <= BASELINE_E_MAX) {
            return Err(VafrError::domain(op, format!("eccentricity {e} outside (0, {BASELINE_E_MAX}]")));
        }
        Ok(())
    }
}

/// LMFR radial shading rate, cpd.
pub fn sr_lmfr(p: &BaselineParams, e: f64) -> Result<f64> {
    p.check_range("sr_lmfr", e)?;
    let z = p.z_checked("sr_lmfr", e)?;
    let k = p.kernel_exponent;
    Ok(0.5 * k * z.powf(k - 1.0) * p.LW(e))
}

/// LaFR shorthands that depend only on the parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LafrTerms {
    pub z_ef: f64,
    pub fa: f64,
    pub u_ef: f64,
}

pub fn lafr_terms(p: &BaselineParams) -> Result<LafrTerms> {
    p.validate()?;
    let z_ef = p.z_checked("sr_lafr", p.e_foveal)?;
    if z_ef >= 1.0 {
        return Err(VafrError::domain("sr_lafr", format!("Z_ef = {z_ef} must be below 1")));
    }
    let fa = p.a - (p.alpha / (1.0 - p.a)).ln() / z_ef.ln();
    if !(fa > 0.0 && fa < 1.0) {
        return Err(VafrError::domain("sr_lafr", format!("Fa = {fa} outside (0, 1)")));
    }
    let u_ef = (z_ef * (1.0 - fa)).powf(1.0 / fa);
    Ok(LafrTerms { z_ef, fa, u_ef })
}

/// Inner (foveal) LaFR branch evaluated at `e`, regardless of `e_foveal`.
pub fn sr_lafr_inner(p: &BaselineParams, e: f64) -> Result<f64> {
    p.check_range("sr_lafr", e)?;
    let t = lafr_terms(p)?;
    let z = p.z_checked("sr_lafr", e)?;
    let fa = t.fa;
    Ok(0.5 * (1.0 - fa) / fa * (z * (1.0 - fa)).powf(1.0 / fa - 1.0) * p.LW(e))
}

/// Outer (peripheral) LaFR branch evaluated at `e`, regardless of `e_foveal`.
pub fn sr_lafr_outer(p: &BaselineParams, e: f64) -> Result<f64> {
    p.check_range("sr_lafr", e)?;
    let t = lafr_terms(p)?;
    let z = p.z_checked("sr_lafr", e)?;
    let k = 1.0 / t.z_ef - 1.0;
    let za = (1.0 / z - 1.0 / t.z_ef) / k;
    if !(za.abs() < 1.0) {
        return Err(VafrError::domain("sr_lafr", format!("|Za| = {} at e = {e} is not below 1", za.abs())));
    }
    let pi = std::f64::consts::PI;
    let g = (2.0 * za.acos() - pi) / pi;
    let q = p.beta / 0.7;
    let dg = 2.0 / pi / (1.0 - za * za).sqrt() / (z * z) / k;
    let sr = 0.5 * (1.0 - t.u_ef) * q * g.powf(q - 1.0) * dg * p.LW(e);
    if !sr.is_finite() {
        return Err(VafrError::domain("sr_lafr", format!("shading rate diverges at e = {e}")));
    }
    Ok(sr)
}

/// LaFR radial shading rate, cpd. `e_foveal` itself belongs to the outer
/// branch.
pub fn sr_lafr(p: &BaselineParams, e: f64) -> Result<f64> {
    if e < p.e_foveal {
        sr_lafr_inner(p, e)
    } else {
        sr_lafr_outer(p, e)
    }
}

/// Left and right limits of [`sr_lafr`] at `e_foveal`.
pub fn lafr_boundary_limits(p: &BaselineParams) -> Result<(f64, f64)> {
    Ok((sr_lafr_inner(p, p.e_foveal)?, sr_lafr_outer(p, p.e_foveal)?))
}

/// Tangential shading rate shared by LMFR and LaFR,
/// `(h/δ) / (720·cos e·sin e)`.
pub fn sr_tangential_baseline(p: &BaselineParams, e: f64) -> Result<f64> {
    p.validate()?;
    if !(e >= 0.01 && e < 90.0) {
        return Err(VafrError::domain("sr_tangential_baseline", format!("eccentricity {e} outside [0.01, 90)")));
    }
    let (s, c) = e.to_radians().sin_cos();
    Ok(f64::from(p.height) / p.delta / (720.0 * c * s))
}

/// Stepped rate profile: `rates[i]` applies on `[thresholds[i-1], thresholds[i])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepProfile {
    pub thresholds: Vec<f64>,
    pub rates: Vec<f64>,
}

impl Default for StepProfile {
    fn default() -> Self {
        StepProfile { thresholds: vec![5.0, 15.0], rates: vec![40.0, 16.0, 8.0] }
    }
}

impl StepProfile {
    pub fn validate(&self) -> Result<()> {
        if self.rates.len() != self.thresholds.len() + 1 {
            return Err(VafrError::invalid(
                "step profile",
                format!("{} thresholds need {} rates, got {}", self.thresholds.len(), self.thresholds.len() + 1, self.rates.len()),
            ));
        }
        if self.thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(VafrError::invalid("step profile", "thresholds must strictly increase"));
        }
        Ok(())
    }

    pub fn rate(&self, e: f64) -> f64 {
        sr_step(&self.thresholds, &self.rates, e)
    }
}

/// Piecewise-constant lookup; a threshold belongs to the layer on its right.
pub fn sr_step(thresholds: &[f64], rates: &[f64], e: f64) -> f64 {
    rates[thresholds.partition_point(|&t| t <= e)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Vafr,
    Lmfr { delta: f64, kernel_exponent: f64 },
    Lafr { delta: f64, a: f64, alpha: f64, beta: f64 },
    Step(StepProfile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodPreset {
    pub name: String,
    pub method: Method,
}

impl MethodPreset {
    fn new(name: &str, method: Method) -> Self {
        MethodPreset { name: name.to_string(), method }
    }
}

/// VaFR, LMFR and LaFR at δ = 1.8 and 2.2, the retuned LMFR(δ=8) and
/// LaFR(δ=8, a=0.78, β=0.9), and the stepped profile.
pub fn paper_presets() -> Vec<MethodPreset> {
    let lafr = |delta, a, beta| Method::Lafr { delta, a, alpha: 0.15, beta };
    vec![
        MethodPreset::new("VaFR", Method::Vafr),
        MethodPreset::new("LMFR(1.8)", Method::Lmfr { delta: 1.8, kernel_exponent: 4.0 }),
        MethodPreset::new("LaFR(1.8)", lafr(1.8, 0.85, 0.7)),
        MethodPreset::new("LaFR(2.2)", lafr(2.2, 0.85, 0.7)),
        MethodPreset::new("LMFR(8)", Method::Lmfr { delta: 8.0, kernel_exponent: 4.0 }),
        MethodPreset::new("LaFR(8,0.78,0.9)", lafr(8.0, 0.78, 0.9)),
        MethodPreset::new("STEP", Method::Step(StepProfile::default())),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GazeSpec {
    Center,
    /// Top-left display corner.
    Corner,
    Pixel(f64, f64),
}

impl GazeSpec {
    pub fn resolve(&self, res: Resolution) -> (f64, f64) {
        match *self {
            GazeSpec::Center => (f64::from(res.width) / 2.0, f64::from(res.height) / 2.0),
            GazeSpec::Corner => (0.0, 0.0),
            GazeSpec::Pixel(x, y) => (x, y),
        }
    }
}

impl fmt::Display for GazeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GazeSpec::Center => f.write_str("center"),
            GazeSpec::Corner => f.write_str("corner"),
            GazeSpec::Pixel(x, y) => write!(f, "{x}:{y}"),
        }
    }
}

impl FromStr for GazeSpec {
    type Err = VafrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "center" | "centre" => Ok(GazeSpec::Center),
            "corner" => Ok(GazeSpec::Corner),
            _ => {
                let bad = || VafrError::invalid("gaze", format!("expected center, corner or x,y, got {s:?}"));
                let (x, y) = s.split_once([',', ':']).ok_or_else(bad)?;
                Ok(GazeSpec::Pixel(x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub methods: Vec<MethodPreset>,
    pub resolutions: Vec<Resolution>,
    pub gazes: Vec<GazeSpec>,
    /// Eccentricities in degrees.
    pub e_grid: Vec<f64>,
    pub model: AcuityModel,
}

impl SweepSpec {
    /// Published method presets over 1440×1700 and every named resolution, centred
    /// gaze, `e = step, 2·step, …, 55`.
    pub fn paper(e_step: f64, gaze_sweep: bool) -> Result<Self> {
        if !(e_step > 0.0 && e_step <= BASELINE_E_MAX) {
            return Err(VafrError::invalid("e step", format!("must lie in (0, {BASELINE_E_MAX}], got {e_step}")));
        }
        let n = (BASELINE_E_MAX / e_step + 1e-9).floor() as usize;
        let e_grid = (1..=n).map(|i| i as f64 * e_step).collect();
        let mut resolutions = vec![Resolution::new(1440, 1700)];
        resolutions.extend(crate::presets::PRESETS.iter().map(|p| p.resolution));
        let gazes = if gaze_sweep { vec![GazeSpec::Center, GazeSpec::Corner] } else { vec![GazeSpec::Center] };
        Ok(SweepSpec { methods: paper_presets(), resolutions, gazes, e_grid, model: AcuityModel::default() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub method: String,
    pub resolution: Resolution,
    pub gaze: GazeSpec,
    pub e: f64,
    pub sr_radial: Option<f64>,
    pub sr_tangential: Option<f64>,
}

fn evaluate(method: &Method, model: &AcuityModel, base: &BaselineParams, e: f64) -> (Option<f64>, Option<f64>) {
    match method {
        Method::Vafr => {
            let f = model.shading_rate(e).ok();
            (f, f)
        }
        Method::Lmfr { delta, kernel_exponent } => {
            let p = BaselineParams { delta: *delta, kernel_exponent: *kernel_exponent, ..*base };
            (sr_lmfr(&p, e).ok(), sr_tangential_baseline(&p, e).ok())
        }
        Method::Lafr { delta, a, alpha, beta } => {
            let p = BaselineParams { delta: *delta, a: *a, alpha: *alpha, beta: *beta, ..*base };
            (sr_lafr(&p, e).ok(), sr_tangential_baseline(&p, e).ok())
        }
        Method::Step(profile) => {
            let r = profile.rate(e);
            (Some(r), Some(r))
        }
    }
}

/// One row per method × resolution × gaze × eccentricity, in that nesting
/// order. Samples outside a method's domain have empty cells.
pub fn analyze(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    for m in &spec.methods {
        if let Method::Step(p) = &m.method {
            p.validate()?;
        }
    }
    let mut jobs = Vec::new();
    for m in &spec.methods {
        for &res in &spec.resolutions {
            for &gaze in &spec.gazes {
                jobs.push((m, res, gaze));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .flat_map_iter(|&(m, res, gaze)| {
            let base = BaselineParams::new(res.width, res.height).with_gaze(gaze.resolve(res));
            spec.e_grid.iter().map(move |&e| {
                let (sr_radial, sr_tangential) = evaluate(&m.method, &spec.model, &base, e);
                SweepRow { method: m.name.clone(), resolution: res, gaze, e, sr_radial, sr_tangential }
            })
        })
        .collect();
    Ok(rows)
}

/// `x` with 9 significant digits, shortest form.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..9).contains(&exp) {
        let s = format!("{x:.8e}");
        let (mant, e) = s.split_once('e').unwrap();
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        return format!("{mant}e{e}");
    }
    let s = format!("{:.*}", (8 - exp).max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub const CSV_HEADER: &str = "method,resolution,gaze,e,sr_radial,sr_tangential";

/// Quotes a CSV field when it holds a comma, quote or newline.
fn csv_field(s: &str) -> std::borrow::Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\"")).into()
    } else {
        s.into()
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let cell = |v: Option<f64>| v.map(fmt_sig9).unwrap_or_default();
    let mut out = String::with_capacity(rows.len() * 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_field(&r.method),
            r.resolution,
            csv_field(&r.gaze.to_string()),
            fmt_sig9(r.e),
            cell(r.sr_radial),
            cell(r.sr_tangential)
        );
    }
    out
}

/// Per-eye pixel/ray counts of one display.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PixelRow {
    pub name: String,
    pub resolution: Resolution,
    pub gt: u64,
    pub vafr: u64,
    /// `W·H/δ²` at δ = 1.8 and 2.2.
    pub lafr_1_8: u64,
    pub lafr_2_2: u64,
}

pub fn pixel_table(ctx: &MappingContext, displays: &[(String, Resolution)]) -> Vec<PixelRow> {
    let vafr = LpLayout::new(ctx).valid_count();
    let reduced = |px: u64, d: f64| (px as f64 / (d * d)).round() as u64;
    displays
        .iter()
        .map(|(name, res)| PixelRow {
            name: name.clone(),
            resolution: *res,
            gt: res.pixels(),
            vafr,
            lafr_1_8: reduced(res.pixels(), 1.8),
            lafr_2_2: reduced(res.pixels(), 2.2),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn lmfr_matches_symbolic_values() {
        let p = BaselineParams::new(2560, 1440);
        assert!(close(sr_lmfr(&p, 10.0).unwrap(), 9.27793508416155058, 1e-12));
        let p = BaselineParams::new(1440, 1700);
        assert!(close(sr_lmfr(&p, 15.0).unwrap(), 6.01577850886023464, 1e-12));
    }

    #[test]
    fn lafr_matches_symbolic_values() {
        let p = BaselineParams::new(1440, 1700);
        assert!(close(lafr_terms(&p).unwrap().u_ef, 0.054279820213267690, 1e-12));
        assert!(close(sr_lafr(&p, 15.0).unwrap(), 6.79883069691938517, 1e-12));
        assert!(close(sr_lafr(&p, 30.0).unwrap(), 3.80366786775100143, 1e-12));
        assert!(close(sr_lafr(&p, 3.0).unwrap(), 2.11994215654154055, 1e-12));
        let corner = p.with_gaze((0.0, 0.0));
        assert!(close(sr_lafr(&corner, 15.0).unwrap(), 5.93495542634346082, 1e-12));
    }

    #[test]
    fn lafr_default_fa_equals_a() {
        let p = BaselineParams::new(1440, 1700);
        assert!((lafr_terms(&p).unwrap().fa - 0.85).abs() < 1e-15);
    }

    #[test]
    fn lafr_boundary_belongs_to_outer_branch() {
        let p = BaselineParams::new(1440, 1700);
        let (_, right) = lafr_boundary_limits(&p).unwrap();
        assert_eq!(sr_lafr(&p, p.e_foveal).unwrap(), right);
    }

    #[test]
    fn lmfr_rises_then_falls_then_exceeds_acuity() {
        let p = BaselineParams::new(2560, 1440);
        let v: Vec<f64> = (1..=55).map(|e| sr_lmfr(&p, f64::from(e)).unwrap()).collect();
        let peak = (0..25).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        assert!(peak > 0 && peak < 10, "peak at {}°", peak + 1);
        assert!(v[..=peak].windows(2).all(|w| w[0] <= w[1]));
        assert!(v[peak..25].windows(2).all(|w| w[0] >= w[1]));
        // the 1/(sin e cos e) factor turns the curve up again in the periphery
        let model = AcuityModel::default();
        for e in [35.0, 45.0, 55.0] {
            assert!(sr_lmfr(&p, e).unwrap() > model.acuity(e).unwrap());
        }
    }

    #[test]
    fn domain_errors() {
        let p = BaselineParams::new(1440, 1700);
        assert_eq!(sr_lmfr(&p, 0.0).unwrap_err().exit_code(), 4);
        assert_eq!(sr_lafr(&p, 56.0).unwrap_err().exit_code(), 4);
        // z ≤ 0 very close to the gaze
        assert_eq!(sr_lmfr(&p, 0.01).unwrap_err().exit_code(), 4);
        assert_eq!(sr_tangential_baseline(&p, 0.005).unwrap_err().exit_code(), 4);
        let bad = BaselineParams { a: 1.2, ..p };
        assert_eq!(sr_lafr(&bad, 10.0).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn tangential_example_and_minimum() {
        let p = BaselineParams::new(2560, 1440);
        let v = sr_tangential_baseline(&p, 30.0).unwrap();
        let expected = 800.0 / (720.0 * 0.5 * 3f64.sqrt() / 2.0);
        assert!(close(v, expected, 1e-12));
        let at45 = sr_tangential_baseline(&p, 45.0).unwrap();
        for e in [10.0, 30.0, 44.0, 46.0, 60.0, 80.0] {
            assert!(sr_tangential_baseline(&p, e).unwrap() > at45);
        }
    }

    #[test]
    fn step_is_right_open() {
        let s = StepProfile::default();
        assert_eq!(s.rate(0.0), 40.0);
        assert_eq!(s.rate(4.999), 40.0);
        assert_eq!(s.rate(5.0), 16.0);
        assert_eq!(s.rate(15.0), 8.0);
        assert_eq!(s.rate(59.0), 8.0);
        assert!(StepProfile { thresholds: vec![1.0], rates: vec![1.0] }.validate().is_err());
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(1.0), "1");
        assert_eq!(fmt_sig9(27.29564203112597), "27.295642");
        assert_eq!(fmt_sig9(0.054279820213267690), "0.0542798202");
        assert_eq!(fmt_sig9(-3.5), "-3.5");
        assert_eq!(fmt_sig9(1.0e-7), "1e-7");
        assert_eq!(fmt_sig9(123456789012.0), "1.23456789e11");
        assert_eq!(fmt_sig9(0.0), "0");
    }

    #[test]
    fn sweep_has_empty_cells_and_constant_vafr() {
        let spec = SweepSpec::paper(0.5, true).unwrap();
        let rows = analyze(&spec).unwrap();
        let expected = spec.methods.len() * spec.resolutions.len() * 2 * spec.e_grid.len();
        assert_eq!(rows.len(), expected);
        let vafr: Vec<_> = rows.iter().filter(|r| r.method == "VaFR").collect();
        for r in &vafr {
            let first = vafr.iter().find(|q| q.e == r.e).unwrap();
            assert_eq!(r.sr_radial, first.sr_radial);
        }
        assert!(rows.iter().all(|r| r.sr_tangential.is_some()));
        assert!(spec.methods.iter().any(|m| m.name == "LaFR(8,0.78,0.9)"));
        let csv = to_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), rows.len() + 1);
    }

    #[test]
    fn out_of_domain_samples_are_empty_cells() {
        let mut spec = SweepSpec::paper(1.0, false).unwrap();
        spec.resolutions.truncate(1);
        spec.e_grid = vec![0.005, 0.01, 10.0, 60.0];
        let rows = analyze(&spec).unwrap();
        let lmfr: Vec<_> = rows.iter().filter(|r| r.method == "LMFR(1.8)").collect();
        assert_eq!(lmfr[0].sr_radial, None);
        assert_eq!(lmfr[0].sr_tangential, None);
        assert_eq!(lmfr[1].sr_radial, None);
        assert!(lmfr[1].sr_tangential.is_some());
        assert!(lmfr[2].sr_radial.is_some());
        assert_eq!(lmfr[3].sr_radial, None);
        let vafr: Vec<_> = rows.iter().filter(|r| r.method == "VaFR").collect();
        assert_eq!(vafr[3].sr_radial, None);
        assert!(to_csv(&rows).contains("LMFR(1.8),1440x1700,center,0.005,,\n"));
    }

    #[test]
    fn csv_quotes_names_with_commas() {
        assert_eq!(csv_field("LaFR(8,0.78,0.9)"), "\"LaFR(8,0.78,0.9)\"");
        assert_eq!(csv_field("a\"b"), "\"a\"\"b\"");
        assert_eq!(csv_field("VaFR"), "VaFR");
    }

    #[test]
    fn pixel_table_lafr_counts() {
        let ctx = MappingContext::for_display(2560, 1440).unwrap();
        let rows = pixel_table(&ctx, &[("2K".into(), Resolution::new(2560, 1440))]);
        assert_eq!(rows[0].gt, 3_686_400);
        assert_eq!(rows[0].lafr_1_8, 1_137_778);
        assert_eq!(rows[0].lafr_2_2, 761_653);
    }
}
