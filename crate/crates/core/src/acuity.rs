//! Piecewise-linear minimum-angle-of-resolution (MAR) model of human visual
//! acuity, and the VaFR shading rate derived from it.
//!
//! Acuity is specified at pivot eccentricities. Between consecutive pivots the
//! MAR `ω(e) = m·e + ω₀` is linear, so acuity `f(e) = 1/ω(e)` is hyperbolic.
//! Each segment also carries the integration constant of the radial LP
//! coordinate `u(e) = ∫₀ᵉ 2 f(t) dt`, fixed by `u(0) = 0` and continuity at
//! every pivot.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VafrError};

/// Default pivots as `(eccentricity °, acuity cpd)`.
pub const DEFAULT_PIVOTS: [(f64, f64); 5] =
    [(0.0, 40.0), (10.0, 10.0), (20.0, 6.0), (30.0, 5.0), (60.0, 4.0)];

/// Maximum perceivable eccentricity in degrees.
pub const DEFAULT_E_MAX: f64 = 60.0;

/// One linear-MAR piece covering `[e_lo, e_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcuitySegment {
    pub e_lo: f64,
    pub e_hi: f64,
    /// MAR slope, degrees-per-cycle per degree.
    pub m: f64,
    /// MAR intercept: `ω(e) = m·e + omega` on this segment.
    pub omega: f64,
    /// Integration constant: `u(e) = 2·ln(m·e + omega)/m + c`, or
    /// `u(e) = 2·e/omega + c` when `m == 0`.
    pub c: f64,
    u_lo: f64,
}

impl AcuitySegment {
    #[inline]
    pub fn mar(&self, e: f64) -> f64 {
        self.m * e + self.omega
    }

    /// `u` at `e`, written relative to the segment start so that flat
    /// segments (`m = 0`) and shallow slopes stay well conditioned.
    #[inline]
    pub(crate) fn u(&self, e: f64) -> f64 {
        let w_lo = self.mar(self.e_lo);
        let de = e - self.e_lo;
        if self.m == 0.0 {
            self.u_lo + 2.0 * de / w_lo
        } else {
            self.u_lo + 2.0 / self.m * (self.m * de / w_lo).ln_1p()
        }
    }

    #[inline]
    pub(crate) fn e(&self, u: f64) -> f64 {
        let w_lo = self.mar(self.e_lo);
        let du = u - self.u_lo;
        if self.m == 0.0 {
            self.e_lo + 0.5 * du * w_lo
        } else {
            self.e_lo + w_lo * (0.5 * self.m * du).exp_m1() / self.m
        }
    }

    /// `u` at the start of the segment.
    pub fn u_lo(&self) -> f64 {
        self.u_lo
    }
}

/// JSON form: `{ "pivots": [[e_deg, f_cpd], ...], "e_max": 60.0 }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcuityConfig {
    pub pivots: Vec<[f64; 2]>,
    #[serde(default = "default_e_max")]
    pub e_max: f64,
}

fn default_e_max() -> f64 {
    DEFAULT_E_MAX
}

impl Default for AcuityConfig {
    fn default() -> Self {
        AcuityConfig {
            pivots: DEFAULT_PIVOTS.iter().map(|&(e, f)| [e, f]).collect(),
            e_max: DEFAULT_E_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcuityModel {
    segments: Vec<AcuitySegment>,
    e_max: f64,
    pivots: Vec<(f64, f64)>,
}

impl Default for AcuityModel {
    fn default() -> Self {
        AcuityModel::from_pivots(&DEFAULT_PIVOTS, DEFAULT_E_MAX)
            .expect("default pivots are valid")
    }
}

impl AcuityModel {
    /// Builds the model from `(eccentricity °, acuity cpd)` pivots.
    ///
    /// The first pivot must sit at 0°, the last at `e_max`, eccentricities
    /// must strictly increase and acuity must be positive and non-increasing
    /// (MAR slopes are non-negative).
    pub fn from_pivots(pivots: &[(f64, f64)], e_max: f64) -> Result<Self> {
        let bad = |index: usize, why: &str| {
            VafrError::invalid("acuity pivots", format!("pivot {index}: {why}"))
        };
        if !(e_max.is_finite() && e_max > 0.0 && e_max < 90.0) {
            return Err(VafrError::invalid(
                "acuity pivots",
                format!("e_max must lie in (0, 90) degrees, got {e_max}"),
            ));
        }
        if pivots.len() < 2 {
            return Err(VafrError::invalid(
                "acuity pivots",
                "at least two pivots are required",
            ));
        }
        for (i, &(e, f)) in pivots.iter().enumerate() {
            if !e.is_finite() || !f.is_finite() {
                return Err(bad(i, "non-finite value"));
            }
            if f <= 0.0 {
                return Err(bad(i, "acuity must be positive"));
            }
            if i == 0 && e != 0.0 {
                return Err(bad(i, "first pivot must be at 0 degrees"));
            }
            if i > 0 {
                let (e_prev, f_prev) = pivots[i - 1];
                if e <= e_prev {
                    return Err(bad(i, "eccentricities must strictly increase"));
                }
                if f > f_prev {
                    return Err(bad(i, "acuity must not increase with eccentricity"));
                }
            }
        }
        let last = pivots.len() - 1;
        if pivots[last].0 != e_max {
            return Err(bad(last, "last pivot must sit at e_max"));
        }

        let mut segments = Vec::with_capacity(last);
        let mut u_lo = 0.0;
        for pair in pivots.windows(2) {
            let (e0, f0) = pair[0];
            let (e1, f1) = pair[1];
            let (w0, w1) = (1.0 / f0, 1.0 / f1);
            let m = if f0 == f1 { 0.0 } else { (w1 - w0) / (e1 - e0) };
            let omega = w0 - m * e0;
            let c = if m == 0.0 {
                u_lo - 2.0 * e0 / omega
            } else {
                u_lo - 2.0 * w0.ln() / m
            };
            let seg = AcuitySegment {
                e_lo: e0,
                e_hi: e1,
                m,
                omega,
                c,
                u_lo,
            };
            u_lo = seg.u(e1);
            segments.push(seg);
        }

        Ok(AcuityModel {
            segments,
            e_max,
            pivots: pivots.to_vec(),
        })
    }

    pub fn from_config(cfg: &AcuityConfig) -> Result<Self> {
        let pivots: Vec<(f64, f64)> = cfg.pivots.iter().map(|p| (p[0], p[1])).collect();
        AcuityModel::from_pivots(&pivots, cfg.e_max)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: AcuityConfig = serde_json::from_str(text)?;
        AcuityModel::from_config(&cfg)
    }

    pub fn to_config(&self) -> AcuityConfig {
        AcuityConfig {
            pivots: self.pivots.iter().map(|&(e, f)| [e, f]).collect(),
            e_max: self.e_max,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_config()).expect("plain data serializes")
    }

    pub fn segments(&self) -> &[AcuitySegment] {
        &self.segments
    }

    pub fn pivots(&self) -> &[(f64, f64)] {
        &self.pivots
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    fn check(&self, op: &'static str, e: f64) -> Result<()> {
        if e >= 0.0 && e < self.e_max {
            Ok(())
        } else {
            Err(VafrError::domain(
                op,
                format!("eccentricity {e} outside [0, {})", self.e_max),
            ))
        }
    }

    /// Segment index for `e`; a pivot belongs to the segment starting there.
    /// `e_max` itself resolves to the last segment.
    #[inline]
    pub(crate) fn segment_index(&self, e: f64) -> usize {
        self.segments
            .partition_point(|s| s.e_hi <= e)
            .min(self.segments.len() - 1)
    }

    #[inline]
    pub(crate) fn segment(&self, e: f64) -> &AcuitySegment {
        &self.segments[self.segment_index(e)]
    }

    /// MAR in degrees per cycle.
    pub fn mar(&self, e: f64) -> Result<f64> {
        self.check("mar", e)?;
        Ok(self.mar_unchecked(e))
    }

    /// Acuity in cycles per degree.
    pub fn acuity(&self, e: f64) -> Result<f64> {
        self.check("acuity", e)?;
        Ok(self.acuity_unchecked(e))
    }

    /// VaFR shading rate in cycles per degree. Identical to [`Self::acuity`]:
    /// the LP mapping is built so that half its radial derivative is acuity.
    pub fn shading_rate(&self, e: f64) -> Result<f64> {
        self.acuity(e)
    }

    #[inline]
    pub(crate) fn mar_unchecked(&self, e: f64) -> f64 {
        self.segment(e).mar(e)
    }

    #[inline]
    pub(crate) fn acuity_unchecked(&self, e: f64) -> f64 {
        1.0 / self.mar_unchecked(e)
    }

    /// `u(e)` for `e ∈ [0, e_max]`; `e_max` gives the analytic limit.
    #[inline]
    pub(crate) fn u_unchecked(&self, e: f64) -> f64 {
        self.segment(e).u(e)
    }

    /// Inverse of [`Self::u_unchecked`] for `u ∈ [0, u_max]`.
    #[inline]
    pub(crate) fn e_unchecked(&self, u: f64) -> f64 {
        let idx = self
            .segments
            .partition_point(|s| s.u_lo <= u)
            .saturating_sub(1);
        self.segments[idx].e(u)
    }

    /// `u(e_max)`, the analytic right-hand limit of the radial coordinate.
    pub fn u_max(&self) -> f64 {
        self.u_unchecked(self.e_max)
    }

    /// Caps acuity at a display's foveal density.
    ///
    /// The result has acuity `min(f(e), cap)`. Because `max(ω(e), 1/cap)` is
    /// linear between the original pivots and the points where the cap
    /// crosses the curve, adding those crossings as pivots represents it
    /// exactly.
    pub fn adapt_to_device(&self, foveal_cap_cpd: f64) -> Result<AcuityModel> {
        if !(foveal_cap_cpd.is_finite() && foveal_cap_cpd > 0.0) {
            return Err(VafrError::domain(
                "adapt_to_device",
                format!("foveal cap must be positive, got {foveal_cap_cpd}"),
            ));
        }
        let cap = foveal_cap_cpd;
        let mut pivots = Vec::with_capacity(self.pivots.len() + 1);
        for pair in self.pivots.windows(2) {
            let (e0, f0) = pair[0];
            let (e1, f1) = pair[1];
            pivots.push((e0, f0.min(cap)));
            if (f0 - cap) * (f1 - cap) < 0.0 {
                let (w0, w1) = (1.0 / f0, 1.0 / f1);
                let t = (1.0 / cap - w0) / (w1 - w0);
                let e_cross = e0 + t * (e1 - e0);
                if e_cross > e0 && e_cross < e1 {
                    pivots.push((e_cross, cap));
                }
            }
        }
        let &(e_last, f_last) = self.pivots.last().expect("at least two pivots");
        pivots.push((e_last, f_last.min(cap)));
        AcuityModel::from_pivots(&pivots, self.e_max)
    }
}
