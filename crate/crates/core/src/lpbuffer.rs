//! The constant-size LP shading buffer.
//!
//! Only the first `h_u` rows of column `u` hold shading points; together the
//! valid texels form a semi-ellipse inside the `lp_w × lp_h` rectangle.
//! Row `v` of column `u` covers the polar angle `θ = 360·(v + 0.5)/h_u`, so
//! rows wrap modulo `h_u` across the 0°/360° seam.
//!
//! Payload is stored column-major (`u·height + v`) so that columns are
//! contiguous and can be written in parallel.

use rayon::prelude::*;
use serde::Serialize;

use crate::image::Image;
use crate::mapping::{shading_height_raw, MappingContext, Polar};

/// Pixel payload of an LP buffer, exchanged with the filters as normalized
/// RGBA in `f32`.
pub trait Texel: Copy + Default + Send + Sync + 'static {
    fn to_rgba(self) -> [f32; 4];
    fn from_rgba(c: [f32; 4]) -> Self;
}

impl Texel for [u8; 4] {
    #[inline]
    fn to_rgba(self) -> [f32; 4] {
        self.map(|c| f32::from(c) / 255.0)
    }

    #[inline]
    fn from_rgba(c: [f32; 4]) -> Self {
        c.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
    }
}

impl Texel for [f32; 4] {
    #[inline]
    fn to_rgba(self) -> [f32; 4] {
        self
    }

    #[inline]
    fn from_rgba(c: [f32; 4]) -> Self {
        c
    }
}

/// Geometry of the valid region: per-column heights and column-centre
/// eccentricities. Depends only on the acuity model and `Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpLayout {
    width: usize,
    height: usize,
    column_heights: Vec<u32>,
    column_ecc: Vec<f64>,
}

impl LpLayout {
    pub fn new(ctx: &MappingContext) -> Self {
        let dims = ctx.dims();
        let model = ctx.model();
        let (column_ecc, column_heights) = (0..dims.lp_w)
            .map(|u| {
                // the last centre can pass u_max because lp_w rounds up
                let uc = (u as f64 + 0.5).min(dims.u_max);
                let e = model.e_unchecked(uc);
                let l = shading_height_raw(model, ctx.delta(), e);
                let h = l.round_ties_even().clamp(0.0, dims.lp_h as f64) as u32;
                (e, h)
            })
            .unzip();
        LpLayout {
            width: dims.lp_w,
            height: dims.lp_h,
            column_heights,
            column_ecc,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn column_heights(&self) -> &[u32] {
        &self.column_heights
    }

    #[inline]
    pub fn column_height(&self, u: usize) -> usize {
        self.column_heights[u] as usize
    }

    /// Eccentricity of the centre of column `u`.
    #[inline]
    pub fn column_ecc(&self, u: usize) -> f64 {
        self.column_ecc[u]
    }

    pub fn valid_count(&self) -> u64 {
        self.column_heights.iter().map(|&h| u64::from(h)).sum()
    }

    /// Eccentricity and angle represented by the centre of texel `(u, v)`.
    #[inline]
    pub fn texel_polar(&self, u: usize, v: usize) -> Polar {
        let h = self.column_heights[u] as f64;
        Polar {
            e: self.column_ecc[u],
            theta: 360.0 * (v as f64 + 0.5) / h,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpBuffer<T: Texel> {
    layout: LpLayout,
    payload: Vec<T>,
}

impl<T: Texel> LpBuffer<T> {
    /// Allocates `lp_w × lp_h` zeroed texels and fills the column heights.
    pub fn build(ctx: &MappingContext) -> Self {
        LpBuffer::with_layout(LpLayout::new(ctx))
    }

    pub fn with_layout(layout: LpLayout) -> Self {
        let payload = vec![T::default(); layout.width * layout.height];
        LpBuffer { layout, payload }
    }

    /// A zeroed buffer with the same geometry.
    pub fn like<S: Texel>(other: &LpBuffer<S>) -> Self {
        LpBuffer::with_layout(other.layout.clone())
    }

    pub fn layout(&self) -> &LpLayout {
        &self.layout
    }
    pub fn width(&self) -> usize {
        self.layout.width
    }
    pub fn height(&self) -> usize {
        self.layout.height
    }
    pub fn column_height(&self, u: usize) -> usize {
        self.layout.column_height(u)
    }
    pub fn valid_count(&self) -> u64 {
        self.layout.valid_count()
    }

    /// Valid texels of column `u`.
    #[inline]
    pub fn column(&self, u: usize) -> &[T] {
        let start = u * self.layout.height;
        &self.payload[start..start + self.layout.column_height(u)]
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> T {
        debug_assert!(v < self.layout.column_height(u));
        self.payload[u * self.layout.height + v]
    }

    pub fn set(&mut self, u: usize, v: usize, t: T) {
        assert!(v < self.layout.column_height(u), "texel ({u}, {v}) is outside the valid region");
        self.payload[u * self.layout.height + v] = t;
    }

    pub fn fill(&mut self, t: T) {
        let height = self.layout.height;
        for (u, col) in self.payload.chunks_mut(height).enumerate() {
            let h = self.layout.column_heights[u] as usize;
            col[..h].fill(t);
        }
    }

    /// Runs `f(u, v)` for every valid texel and stores the result, in
    /// parallel over columns. Output does not depend on the thread count.
    pub fn par_fill_with<F>(&mut self, f: F)
    where
        F: Fn(usize, usize) -> T + Sync,
    {
        let layout = &self.layout;
        self.payload
            .par_chunks_mut(layout.height)
            .enumerate()
            .for_each(|(u, col)| {
                let h = layout.column_heights[u] as usize;
                for (v, t) in col[..h].iter_mut().enumerate() {
                    *t = f(u, v);
                }
            });
    }

    /// Linear sample within column `u` at fraction `turn` of a revolution,
    /// wrapping across the 0°/360° seam.
    #[inline]
    fn sample_column(&self, u: usize, turn: f64) -> Option<[f32; 4]> {
        let h = self.layout.column_heights[u] as usize;
        if h == 0 {
            return None;
        }
        let col = &self.payload[u * self.layout.height..];
        let y = turn * h as f64 - 0.5;
        let y0 = y.floor();
        let t = (y - y0) as f32;
        let i0 = (y0 as i64).rem_euclid(h as i64) as usize;
        let i1 = if i0 + 1 == h { 0 } else { i0 + 1 };
        let (a, b) = (col[i0].to_rgba(), col[i1].to_rgba());
        Some(lerp4(a, b, t))
    }

    /// Bilinear sample at continuous radial coordinate `u` (texel centres at
    /// `k + 0.5`, clamped to the first and last column) and polar fraction
    /// `turn = θ/360`. Each column is addressed by angle, so neighbouring
    /// columns of different heights stay angularly aligned.
    pub fn sample(&self, u: f64, turn: f64) -> [f32; 4] {
        let last = self.layout.width - 1;
        let uc = (u - 0.5).clamp(0.0, last as f64);
        let c0 = uc.floor() as usize;
        let c1 = (c0 + 1).min(last);
        let t = (uc - c0 as f64) as f32;
        match (self.sample_column(c0, turn), self.sample_column(c1, turn)) {
            (Some(a), Some(b)) => lerp4(a, b, t),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => [0.0; 4],
        }
    }

    /// Converts the payload to another texel type.
    pub fn map<S: Texel>(&self) -> LpBuffer<S> {
        let mut out = LpBuffer::<S>::with_layout(self.layout.clone());
        for (dst, src) in out.payload.iter_mut().zip(&self.payload) {
            *dst = S::from_rgba(src.to_rgba());
        }
        out
    }

    /// Debug view: `lp_w × lp_h` RGB image, `u` left to right and `v` top to
    /// bottom, with texels outside the valid region drawn magenta.
    pub fn to_debug_image(&self) -> Image {
        let (w, h) = (self.layout.width, self.layout.height);
        let mut img = Image::new(w as u32, h as u32, 3);
        for u in 0..w {
            let hu = self.layout.column_height(u);
            for v in 0..h {
                let rgb = if v < hu {
                    let c = <[u8; 4]>::from_rgba(self.get(u, v).to_rgba());
                    [c[0], c[1], c[2]]
                } else {
                    [255, 0, 255]
                };
                img.put_rgb(u as u32, v as u32, rgb);
            }
        }
        img
    }
}

#[inline]
pub(crate) fn lerp4(a: [f32; 4], b: [f32; 4], t: f32) -> [f32; 4] {
    std::array::from_fn(|i| a[i] + (b[i] - a[i]) * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BufferStats {
    pub width: usize,
    pub height: usize,
    pub valid_count: u64,
    pub fill_ratio: f64,
    /// One primary ray per valid shading point.
    pub rays_per_eye: u64,
    pub display_width: u32,
    pub display_height: u32,
    /// Native (unfoveated) pixel count of the display.
    pub gt_pixels: u64,
}

pub fn stats<T: Texel>(buf: &LpBuffer<T>, ctx: &MappingContext) -> BufferStats {
    layout_stats(buf.layout(), ctx)
}

pub fn layout_stats(layout: &LpLayout, ctx: &MappingContext) -> BufferStats {
    let valid = layout.valid_count();
    let (dw, dh) = ctx.display();
    BufferStats {
        width: layout.width,
        height: layout.height,
        valid_count: valid,
        fill_ratio: valid as f64 / (layout.width * layout.height) as f64,
        rays_per_eye: valid,
        display_width: dw,
        display_height: dh,
        gt_pixels: u64::from(dw) * u64::from(dh),
    }
}
