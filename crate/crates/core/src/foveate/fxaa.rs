//! FXAA (quality variant) running inside the LP buffer.
//!
//! Offsets are expressed in the texel frame of the centre texel: one step
//! along `u` lands on the neighbouring column at the same polar angle, one
//! step along `v` is one row of the current column and wraps at the seam.

use crate::lpbuffer::{LpBuffer, Texel};

/// Minimum local contrast, relative to the local maximum luma, that counts
/// as an edge.
pub const EDGE_THRESHOLD: f32 = 1.0 / 8.0;
/// Absolute contrast floor that skips dark regions.
pub const EDGE_THRESHOLD_MIN: f32 = 1.0 / 24.0;
/// Amount of sub-texel aliasing removal.
pub const SUBPIXEL: f32 = 0.75;

/// Edge-search step lengths in texels.
const SEARCH_STEPS: [f32; 5] = [1.0, 1.5, 2.0, 4.0, 12.0];

#[inline]
fn luma(c: [f32; 4]) -> f32 {
    0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]
}

/// Sampling in the local frame of texel `(u, v)`.
struct Frame<'a, T: Texel> {
    buf: &'a LpBuffer<T>,
    u: f64,
    v: f64,
    rows: f64,
}

impl<T: Texel> Frame<'_, T> {
    #[inline]
    fn at(&self, du: f32, dv: f32) -> [f32; 4] {
        let turn = (self.v + f64::from(dv)) / self.rows;
        self.buf.sample(self.u + f64::from(du), turn.rem_euclid(1.0))
    }

    #[inline]
    fn luma(&self, du: f32, dv: f32) -> f32 {
        luma(self.at(du, dv))
    }
}

/// Anti-aliases every valid texel, reading `src` and writing a new buffer.
pub fn lp_antialias<T: Texel>(src: &LpBuffer<T>) -> LpBuffer<T> {
    let mut dst = LpBuffer::like(src);
    lp_antialias_into(src, &mut dst);
    dst
}

/// Same as [`lp_antialias`] into an existing buffer of identical layout.
pub fn lp_antialias_into<T: Texel>(src: &LpBuffer<T>, dst: &mut LpBuffer<T>) {
    assert_eq!(src.layout(), dst.layout(), "buffers must share a layout");
    dst.par_fill_with(|u, v| T::from_rgba(fxaa_texel(src, u, v)));
}

fn fxaa_texel<T: Texel>(buf: &LpBuffer<T>, u: usize, v: usize) -> [f32; 4] {
    let centre = buf.get(u, v).to_rgba();
    let frame = Frame {
        buf,
        u: u as f64 + 0.5,
        v: v as f64 + 0.5,
        rows: buf.column_height(u) as f64,
    };

    let luma_m = luma(centre);
    let mut luma_n = frame.luma(0.0, -1.0);
    let mut luma_s = frame.luma(0.0, 1.0);
    let luma_w = frame.luma(-1.0, 0.0);
    let luma_e = frame.luma(1.0, 0.0);

    let max_l = luma_m.max(luma_n).max(luma_s).max(luma_w).max(luma_e);
    let min_l = luma_m.min(luma_n).min(luma_s).min(luma_w).min(luma_e);
    let range = max_l - min_l;
    if range < EDGE_THRESHOLD_MIN.max(max_l * EDGE_THRESHOLD) {
        return centre;
    }

    let luma_nw = frame.luma(-1.0, -1.0);
    let luma_ne = frame.luma(1.0, -1.0);
    let luma_sw = frame.luma(-1.0, 1.0);
    let luma_se = frame.luma(1.0, 1.0);

    let luma_ns = luma_n + luma_s;
    let luma_we = luma_w + luma_e;
    let edge_horz = (-2.0 * luma_w + luma_nw + luma_sw).abs()
        + 2.0 * (-2.0 * luma_m + luma_ns).abs()
        + (-2.0 * luma_e + luma_ne + luma_se).abs();
    let edge_vert = (-2.0 * luma_s + luma_sw + luma_se).abs()
        + 2.0 * (-2.0 * luma_m + luma_we).abs()
        + (-2.0 * luma_n + luma_nw + luma_ne).abs();
    // horizontal edge: runs along u, blend across v
    let horz_span = edge_horz >= edge_vert;

    let subpix_a = 2.0 * (luma_ns + luma_we) + luma_nw + luma_ne + luma_sw + luma_se;
    let subpix_b = subpix_a / 12.0 - luma_m;
    let subpix_c = (subpix_b.abs() / range).clamp(0.0, 1.0);
    let subpix_f = (-2.0 * subpix_c + 3.0) * subpix_c * subpix_c;
    let subpix_h = subpix_f * subpix_f * SUBPIXEL;

    if !horz_span {
        luma_n = luma_w;
        luma_s = luma_e;
    }
    let gradient_n = luma_n - luma_m;
    let gradient_s = luma_s - luma_m;
    let pair_n = gradient_n.abs() >= gradient_s.abs();
    let gradient = gradient_n.abs().max(gradient_s.abs());
    let length_sign: f32 = if pair_n { -1.0 } else { 1.0 };
    let luma_pair = if pair_n { luma_n + luma_m } else { luma_s + luma_m };
    let luma_local = 0.5 * luma_pair;
    let gradient_scaled = gradient / 4.0;
    let luma_mm_neg = luma_m - luma_local < 0.0;

    // start half a texel across the edge, then walk both ways along it
    let (base_u, base_v) = if horz_span { (0.0, 0.5 * length_sign) } else { (0.5 * length_sign, 0.0) };
    let (step_u, step_v) = if horz_span { (1.0, 0.0) } else { (0.0, 1.0) };
    let probe = |d: f32| frame.luma(base_u + step_u * d, base_v + step_v * d) - luma_local;

    let mut dist_n = SEARCH_STEPS[0];
    let mut dist_p = SEARCH_STEPS[0];
    let mut end_n = probe(-dist_n);
    let mut end_p = probe(dist_p);
    let mut done_n = end_n.abs() >= gradient_scaled;
    let mut done_p = end_p.abs() >= gradient_scaled;
    for &step in &SEARCH_STEPS[1..] {
        if done_n && done_p {
            break;
        }
        if !done_n {
            dist_n += step;
            end_n = probe(-dist_n);
            done_n = end_n.abs() >= gradient_scaled;
        }
        if !done_p {
            dist_p += step;
            end_p = probe(dist_p);
            done_p = end_p.abs() >= gradient_scaled;
        }
    }

    let good_span = if dist_n < dist_p {
        (end_n < 0.0) != luma_mm_neg
    } else {
        (end_p < 0.0) != luma_mm_neg
    };
    let pixel_offset = -dist_n.min(dist_p) / (dist_n + dist_p) + 0.5;
    let offset = if good_span { pixel_offset } else { 0.0 }.max(subpix_h) * length_sign;

    if horz_span {
        frame.at(0.0, offset)
    } else {
        frame.at(offset, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::MappingContext;

    fn buffer() -> LpBuffer<[u8; 4]> {
        LpBuffer::build(&MappingContext::for_display(1920, 1080).unwrap())
    }

    #[test]
    fn constant_buffer_is_unchanged() {
        let mut buf = buffer();
        buf.fill([90, 120, 200, 255]);
        let out = lp_antialias(&buf);
        for u in 0..buf.width() {
            assert_eq!(out.column(u), buf.column(u));
        }
    }

    #[test]
    fn edge_is_blended_within_neighbourhood_range() {
        let mut buf = buffer();
        // hard edge near column 400 with a one-column step every 7 rows
        let step = |v: usize| (v % 14) / 7;
        buf.par_fill_with(|u, v| if u + step(v) >= 400 { [255; 4] } else { [0, 0, 0, 255] });
        let out = lp_antialias(&buf);
        let mut changed = 0;
        for u in 0..buf.width() {
            for v in 0..buf.column_height(u) {
                let (a, b) = (buf.get(u, v), out.get(u, v));
                if a != b {
                    changed += 1;
                    // only texels near the staircase move
                    let d = (u + step(v)) as i64 - 400;
                    assert!(d.abs() <= 3, "texel ({u}, {v}) changed far from the edge");
                }
            }
        }
        assert!(changed > 0);
    }

    #[test]
    fn seam_neighbours_wrap() {
        let mut buf = buffer();
        let u = 500;
        let h = buf.column_height(u);
        buf.par_fill_with(|cu, v| if cu == u && v < 3 { [255; 4] } else { [0, 0, 0, 255] });
        let out = lp_antialias(&buf);
        // the last row sees the bright first rows across the seam
        assert!(out.get(u, h - 1)[0] > 0);
        assert_eq!(out.get(u, h / 2)[0], 0);
    }
}
