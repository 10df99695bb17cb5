//! Image foveation: screen → LP buffer → FXAA → screen.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VafrError};
use crate::image::Image;
use crate::lpbuffer::{LpBuffer, Texel};
use crate::mapping::MappingContext;

pub mod fxaa;

pub use fxaa::{lp_antialias, lp_antialias_into};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AaMode {
    None,
    #[default]
    LpFxaa,
}

/// What to draw where the eccentricity reaches `e_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutsidePolicy {
    /// Sample the outermost LP ring.
    #[default]
    ClampRing,
    /// Copy the source pixel unchanged.
    PassthroughSource,
    SolidColor([u8; 4]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoveationParams {
    /// Gaze point in pixels.
    pub gaze: (f64, f64),
    #[serde(default)]
    pub aa_mode: AaMode,
    #[serde(default)]
    pub outside_policy: OutsidePolicy,
}

impl FoveationParams {
    pub fn new(gaze: (f64, f64)) -> Self {
        FoveationParams { gaze, aa_mode: AaMode::default(), outside_policy: OutsidePolicy::default() }
    }
}

fn check_buffer<T: Texel>(buf: &LpBuffer<T>, ctx: &MappingContext) -> Result<()> {
    if buf.width() != ctx.lp_w() || buf.height() != ctx.lp_h() {
        return Err(VafrError::invalid(
            "LP buffer",
            format!(
                "buffer is {}x{} but the context needs {}x{}",
                buf.width(),
                buf.height(),
                ctx.lp_w(),
                ctx.lp_h()
            ),
        ));
    }
    Ok(())
}

/// Resamples `img` into `buf`: every valid texel centre is inverse-mapped to
/// the screen and sampled bilinearly.
pub fn to_lp<T: Texel>(img: &Image, ctx: &MappingContext, buf: &mut LpBuffer<T>) -> Result<()> {
    let (w, h) = ctx.display();
    if img.width() != w || img.height() != h {
        return Err(VafrError::invalid(
            "image",
            format!("image is {}x{} but the display is {w}x{h}", img.width(), img.height()),
        ));
    }
    check_buffer(buf, ctx)?;
    let layout = buf.layout().clone();
    buf.par_fill_with(|u, v| {
        let p = layout.texel_polar(u, v);
        let (x, y) = ctx.screen_from_polar(p.e, p.theta);
        T::from_rgba(img.sample_bilinear(x, y))
    });
    Ok(())
}

/// Reconstructs an RGB screen image from `buf`. Pass-through of source
/// pixels needs the source, see [`from_lp_into`].
pub fn from_lp<T: Texel>(buf: &LpBuffer<T>, ctx: &MappingContext, params: &FoveationParams) -> Result<Image> {
    if params.outside_policy == OutsidePolicy::PassthroughSource {
        return Err(VafrError::invalid("outside policy", "passthrough_source needs the source image"));
    }
    let ctx = ctx.clone().with_gaze(params.gaze)?;
    let (w, h) = ctx.display();
    let mut out = Image::new(w, h, 3);
    from_lp_into(buf, &ctx, params.outside_policy, None, &mut out)?;
    Ok(out)
}

/// Inverse pass into an existing image of the display size. A 4-channel
/// output also receives the sampled alpha.
pub fn from_lp_into<T: Texel>(
    buf: &LpBuffer<T>,
    ctx: &MappingContext,
    policy: OutsidePolicy,
    source: Option<&Image>,
    out: &mut Image,
) -> Result<()> {
    check_buffer(buf, ctx)?;
    let (w, h) = ctx.display();
    if out.width() != w || out.height() != h {
        return Err(VafrError::invalid(
            "image",
            format!("output is {}x{} but the display is {w}x{h}", out.width(), out.height()),
        ));
    }
    let source = match policy {
        OutsidePolicy::PassthroughSource => {
            let src = source
                .ok_or_else(|| VafrError::invalid("outside policy", "passthrough_source needs the source image"))?;
            if src.width() != w || src.height() != h {
                return Err(VafrError::invalid("image", "source and output sizes differ"));
            }
            Some(src)
        }
        _ => None,
    };

    let ch = out.channels() as usize;
    let row_len = w as usize * ch;
    let e_max = ctx.e_max();
    let u_max = ctx.u_max();
    let model = ctx.model();
    out.data_mut().par_chunks_mut(row_len).enumerate().for_each(|(y, row)| {
        for (x, px) in row.chunks_exact_mut(ch).enumerate() {
            let p = ctx.polar(x as f64 + 0.5, y as f64 + 0.5);
            let u = if p.e < e_max {
                model.u_unchecked(p.e)
            } else {
                match policy {
                    OutsidePolicy::ClampRing => u_max,
                    OutsidePolicy::SolidColor(c) => {
                        px.copy_from_slice(&c[..ch]);
                        continue;
                    }
                    OutsidePolicy::PassthroughSource => {
                        let c = <[u8; 4]>::from_rgba(source.unwrap().rgba_f32(x as u32, y as u32));
                        px.copy_from_slice(&c[..ch]);
                        continue;
                    }
                }
            };
            let c = <[u8; 4]>::from_rgba(buf.sample(u, p.theta / 360.0));
            px.copy_from_slice(&c[..ch]);
        }
    });
    Ok(())
}

/// Full pipeline with the LP buffers kept between frames.
#[derive(Debug, Clone)]
pub struct Foveator {
    ctx: MappingContext,
    buf: LpBuffer<[u8; 4]>,
    scratch: LpBuffer<[u8; 4]>,
}

impl Foveator {
    pub fn new(ctx: MappingContext) -> Self {
        let buf = LpBuffer::build(&ctx);
        let scratch = LpBuffer::like(&buf);
        Foveator { ctx, buf, scratch }
    }

    pub fn context(&self) -> &MappingContext {
        &self.ctx
    }

    /// LP buffer of the last frame (after anti-aliasing when enabled).
    pub fn buffer(&self) -> &LpBuffer<[u8; 4]> {
        &self.buf
    }

    pub fn foveate(&mut self, img: &Image, params: &FoveationParams) -> Result<Image> {
        self.ctx = self.ctx.clone().with_gaze(params.gaze)?;
        to_lp(img, &self.ctx, &mut self.buf)?;
        if params.aa_mode == AaMode::LpFxaa {
            lp_antialias_into(&self.buf, &mut self.scratch);
            std::mem::swap(&mut self.buf, &mut self.scratch);
        }
        let mut out = Image::new(img.width(), img.height(), img.channels());
        from_lp_into(&self.buf, &self.ctx, params.outside_policy, Some(img), &mut out)?;
        Ok(out)
    }
}

/// One-shot [`Foveator::foveate`].
pub fn foveate(img: &Image, ctx: &MappingContext, params: &FoveationParams) -> Result<Image> {
    Foveator::new(ctx.clone()).foveate(img, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> MappingContext {
        MappingContext::for_display(1920, 1080).unwrap()
    }

    #[test]
    fn constant_image_roundtrips_exactly() {
        let ctx = ctx();
        let img = Image::filled(1920, 1080, [37, 140, 222, 255], 3);
        let params = FoveationParams::new(ctx.gaze());
        let out = foveate(&img, &ctx, &params).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn foveal_dot_lands_in_first_columns() {
        let ctx = ctx();
        let mut img = Image::new(1920, 1080, 3);
        for y in 536..545 {
            for x in 956..965 {
                let (dx, dy) = (x as f64 + 0.5 - 960.0, y as f64 + 0.5 - 540.0);
                if dx.hypot(dy) <= 3.0 {
                    img.put_rgb(x, y, [255; 3]);
                }
            }
        }
        let mut buf = LpBuffer::<[u8; 4]>::build(&ctx);
        to_lp(&img, &ctx, &mut buf).unwrap();
        let r_edge = ctx.u_of_e(ctx.ecc_from_radius(4.5).unwrap()).unwrap();
        let mut lit = 0;
        for u in 0..buf.width() {
            for v in 0..buf.column_height(u) {
                if buf.get(u, v)[0] > 0 {
                    assert!((u as f64) < r_edge, "column {u} lit beyond u {r_edge}");
                    lit += 1;
                }
            }
        }
        assert!(lit > 0);
    }

    #[test]
    fn impulse_maps_to_forward_position() {
        // tall display so that 30° below the gaze is on screen
        let ctx = MappingContext::new(Default::default(), 1.0 / 1080.0, (1920, 1400), (960.0, 540.0), Default::default())
            .unwrap();
        let r = ctx.radius_from_ecc(30.0).unwrap();
        // θ = 90° points down the screen (+y)
        let (x, y): (f64, f64) = (960.0, 540.0 + r);
        let mut img = Image::new(1920, 1400, 3);
        img.put_rgb(x.floor() as u32, y.floor() as u32, [255; 3]);
        let mut buf = LpBuffer::<[u8; 4]>::build(&ctx);
        to_lp(&img, &ctx, &mut buf).unwrap();
        let mut best = (0, 0, 0);
        for u in 0..buf.width() {
            for v in 0..buf.column_height(u) {
                let val = buf.get(u, v)[0];
                if val > best.2 {
                    best = (u, v, val);
                }
            }
        }
        let eu = ctx.u_of_e(30.0).unwrap();
        let ev = ctx.v_of(30.0, 90.0).unwrap();
        assert!(best.2 > 0);
        assert!((best.0 as f64 + 0.5 - eu).abs() <= 1.5, "u {} vs {eu}", best.0);
        assert!((best.1 as f64 + 0.5 - ev).abs() <= 1.5, "v {} vs {ev}", best.1);
    }

    #[test]
    fn gaze_changes_output_not_buffer() {
        let ctx = ctx();
        let mut img = Image::new(1920, 1080, 3);
        for y in 0..1080 {
            for x in 0..1920 {
                img.put_rgb(x, y, [(x % 256) as u8, (y % 256) as u8, ((x ^ y) % 256) as u8]);
            }
        }
        let mut fov = Foveator::new(ctx.clone());
        let a = fov.foveate(&img, &FoveationParams::new((960.0, 540.0))).unwrap();
        let dims = fov.buffer().layout().clone();
        let b = fov.foveate(&img, &FoveationParams::new((0.0, 1080.0))).unwrap();
        assert_ne!(a, b);
        assert_eq!(fov.buffer().layout(), &dims);
    }

    #[test]
    fn outside_policies() {
        // wide field of view: the corners sit beyond e_max
        let ctx = MappingContext::new(
            Default::default(),
            0.02,
            (320, 240),
            (160.0, 120.0),
            Default::default(),
        )
        .unwrap();
        let img = Image::filled(320, 240, [10, 20, 30, 255], 3);
        let mut params = FoveationParams::new((160.0, 120.0));
        params.outside_policy = OutsidePolicy::SolidColor([255, 0, 0, 255]);
        let out = foveate(&img, &ctx, &params).unwrap();
        assert_eq!(out.rgb(0, 0), [255, 0, 0]);
        assert_eq!(out.rgb(160, 120), [10, 20, 30]);

        params.outside_policy = OutsidePolicy::ClampRing;
        assert_eq!(foveate(&img, &ctx, &params).unwrap(), img);

        params.outside_policy = OutsidePolicy::PassthroughSource;
        assert_eq!(foveate(&img, &ctx, &params).unwrap(), img);
        assert!(from_lp(&LpBuffer::<[u8; 4]>::build(&ctx), &ctx, &params).is_err());
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let ctx = ctx();
        let img = Image::new(100, 100, 3);
        let mut buf = LpBuffer::<[u8; 4]>::build(&ctx);
        assert_eq!(to_lp(&img, &ctx, &mut buf).unwrap_err().exit_code(), 2);
    }
}
