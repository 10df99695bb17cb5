//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

/// Default acuity pivots as (eccentricity °, acuity cpd).
pub const PIVOTS: [(f64, f64); 5] = [(0.0, 40.0), (10.0, 10.0), (20.0, 6.0), (30.0, 5.0), (60.0, 4.0)];

/// MAR by linear interpolation of 1/f between neighbouring pivots.
pub fn mar(e: f64) -> f64 {
    let i = PIVOTS.windows(2).position(|w| e < w[1].0).unwrap_or(PIVOTS.len() - 2);
    let (e0, f0) = PIVOTS[i];
    let (e1, f1) = PIVOTS[i + 1];
    let t = (e - e0) / (e1 - e0);
    (1.0 / f0) * (1.0 - t) + (1.0 / f1) * t
}

pub fn acuity(e: f64) -> f64 {
    1.0 / mar(e)
}

/// LP rows per revolution at `e` for a constant anisotropy `delta`.
pub fn shading_height(e: f64, delta: f64) -> f64 {
    delta * 360.0 * (2.0 * e).to_radians().sin() / mar(e)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫₀ᵉ 2 f(t) dt` by quadrature, split at the pivots where `f` has kinks.
pub fn u_of_e(e: f64) -> f64 {
    PIVOTS
        .windows(2)
        .map(|w| integrate(|t| 2.0 * acuity(t), w[0].0, e.min(w[1].0), 1e-13))
        .sum()
}

/// Peak signal-to-noise ratio in dB over paired 8-bit samples.
pub fn psnr(a: &[u8], b: &[u8]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mse = a.iter().zip(b).map(|(&x, &y)| (f64::from(x) - f64::from(y)).powi(2)).sum::<f64>() / a.len() as f64;
    10.0 * (255.0f64 * 255.0 / mse).log10()
}

/// RGB samples of `img` within `radius` pixels of `centre`.
pub fn disk_samples(img: &vafr::Image, centre: (f64, f64), radius: f64) -> Vec<u8> {
    let mut out = Vec::new();
    for y in 0..img.height() {
        for x in 0..img.width() {
            let (dx, dy) = (f64::from(x) + 0.5 - centre.0, f64::from(y) + 0.5 - centre.1);
            if dx.hypot(dy) <= radius {
                out.extend_from_slice(&img.rgb(x, y));
            }
        }
    }
    out
}
