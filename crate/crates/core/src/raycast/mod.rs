//! CPU ray caster: one primary ray per valid LP texel (VaFR) or per screen
//! pixel (GT).

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VafrError};
use crate::foveate::{from_lp_into, lp_antialias, AaMode, OutsidePolicy};
use crate::image::Image;
use crate::lpbuffer::{LpBuffer, Texel};
use crate::mapping::MappingContext;

pub mod camera;
pub mod scene;
pub mod vec3;

pub use camera::{Camera, CameraSpec};
pub use scene::{DirectionalLight, Material, PointLight, Ray, Scene, Sphere, Triangle};
pub use vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderMode {
    #[default]
    Vafr,
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RenderStats {
    pub mode: RenderMode,
    pub width: u32,
    pub height: u32,
    pub primary_rays: u64,
    pub shadow_rays: u64,
    pub trace_ms: f64,
    pub antialias_ms: f64,
    pub inverse_ms: f64,
    pub total_ms: f64,
}

/// Scene plus camera, the on-disk scene format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub camera: CameraSpec,
    #[serde(flatten)]
    pub scene: Scene,
}

impl SceneFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| VafrError::Io { path: path.to_path_buf(), source })?;
        let file: SceneFile = serde_json::from_str(&text)?;
        file.scene.validate()?;
        Ok(file)
    }
}

fn to_texel(c: [f64; 3]) -> [f32; 4] {
    [c[0] as f32, c[1] as f32, c[2] as f32, 1.0]
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn check_consistent(cam: &Camera, ctx: &MappingContext) -> Result<()> {
    if cam.display() != ctx.display() {
        return Err(VafrError::invalid("render", "camera and mapping display sizes differ"));
    }
    if (cam.c_r() - ctx.c_r()).abs() > 1e-12 * ctx.c_r() {
        return Err(VafrError::invalid(
            "render",
            format!("camera c_r {} differs from mapping c_r {}", cam.c_r(), ctx.c_r()),
        ));
    }
    Ok(())
}

/// Shades every valid texel of `buf`. Returns `(primary, shadow)` ray
/// counts.
pub fn trace_lp(scene: &Scene, cam: &Camera, ctx: &MappingContext, buf: &mut LpBuffer<[f32; 4]>) -> Result<(u64, u64)> {
    scene.validate()?;
    check_consistent(cam, ctx)?;
    if buf.width() != ctx.lp_w() || buf.height() != ctx.lp_h() {
        return Err(VafrError::invalid("render", "LP buffer does not match the mapping"));
    }
    let primary = AtomicU64::new(0);
    let shadow = AtomicU64::new(0);
    let layout = buf.layout().clone();
    buf.par_fill_with(|u, v| {
        let p = layout.texel_polar(u, v);
        let (x, y) = ctx.screen_from_polar(p.e, p.theta);
        let (c, s) = scene.shade(&cam.generate_ray(x, y));
        primary.fetch_add(1, Ordering::Relaxed);
        shadow.fetch_add(s, Ordering::Relaxed);
        to_texel(c)
    });
    Ok((primary.into_inner(), shadow.into_inner()))
}

/// LP trace, optional LP FXAA, inverse mapping to an RGB image. Pixels
/// beyond `e_max` take the outermost ring.
pub fn render_vafr(scene: &Scene, cam: &Camera, ctx: &MappingContext, aa: AaMode) -> Result<(Image, RenderStats)> {
    let start = Instant::now();
    let mut buf = LpBuffer::<[f32; 4]>::build(ctx);
    let (primary_rays, shadow_rays) = trace_lp(scene, cam, ctx, &mut buf)?;
    let trace_ms = ms_since(start);

    let t = Instant::now();
    if aa == AaMode::LpFxaa {
        buf = lp_antialias(&buf);
    }
    let antialias_ms = ms_since(t);

    let t = Instant::now();
    let (w, h) = ctx.display();
    let mut img = Image::new(w, h, 3);
    from_lp_into(&buf, ctx, OutsidePolicy::ClampRing, None, &mut img)?;
    let inverse_ms = ms_since(t);

    let stats = RenderStats {
        mode: RenderMode::Vafr,
        width: w,
        height: h,
        primary_rays,
        shadow_rays,
        trace_ms,
        antialias_ms,
        inverse_ms,
        total_ms: ms_since(start),
    };
    Ok((img, stats))
}

/// Native rendering: one ray through every pixel centre.
pub fn render_gt(scene: &Scene, cam: &Camera) -> Result<(Image, RenderStats)> {
    scene.validate()?;
    let start = Instant::now();
    let (w, h) = cam.display();
    let mut img = Image::new(w, h, 3);
    let shadow = AtomicU64::new(0);
    img.data_mut().par_chunks_mut(w as usize * 3).enumerate().for_each(|(y, row)| {
        let mut s_row = 0;
        for (x, px) in row.chunks_exact_mut(3).enumerate() {
            let (c, s) = scene.shade(&cam.generate_ray(x as f64 + 0.5, y as f64 + 0.5));
            s_row += s;
            let c = <[u8; 4]>::from_rgba(to_texel(c));
            px.copy_from_slice(&c[..3]);
        }
        shadow.fetch_add(s_row, Ordering::Relaxed);
    });
    let trace_ms = ms_since(start);
    let stats = RenderStats {
        mode: RenderMode::Gt,
        width: w,
        height: h,
        primary_rays: u64::from(w) * u64::from(h),
        shadow_rays: shadow.into_inner(),
        trace_ms,
        total_ms: trace_ms,
        ..Default::default()
    };
    Ok((img, stats))
}

/// Test scene with `lights` point lights on a ring: a ground quad, a red
/// sphere straight ahead of the camera and four smaller spheres around it.
pub fn fixture_scene(lights: usize) -> Result<SceneFile> {
    if lights == 0 {
        return Err(VafrError::invalid("fixture", "at least one light is required"));
    }
    let mat = |r, g, b, specular| Material { albedo: [r, g, b], specular, shininess: 48.0 };
    let ground = mat(0.6, 0.6, 0.55, 0.0);
    let (a, b, c, d) = (
        Vec3::new(-20.0, 0.0, -5.0),
        Vec3::new(20.0, 0.0, -5.0),
        Vec3::new(20.0, 0.0, 40.0),
        Vec3::new(-20.0, 0.0, 40.0),
    );
    let mut spheres = vec![Sphere { center: Vec3::new(0.0, 1.0, 6.0), radius: 1.0, material: mat(0.8, 0.2, 0.15, 0.4) }];
    for (i, (x, z)) in [(-2.5, 8.0), (2.5, 8.0), (-1.5, 4.0), (1.8, 11.0)].into_iter().enumerate() {
        let albedo = [[0.2, 0.5, 0.8], [0.3, 0.8, 0.3], [0.9, 0.8, 0.2], [0.7, 0.3, 0.8]][i];
        spheres.push(Sphere { center: Vec3::new(x, 0.6, z), radius: 0.6, material: mat(albedo[0], albedo[1], albedo[2], 0.3) });
    }
    let energy = 60.0 / lights as f64;
    let point_lights = (0..lights)
        .map(|i| {
            let phi = std::f64::consts::TAU * i as f64 / lights as f64;
            PointLight {
                position: Vec3::new(6.0 * phi.cos(), 5.0 + (i % 3) as f64, 7.0 + 6.0 * phi.sin()),
                intensity: [energy; 3],
            }
        })
        .collect();
    let scene = Scene {
        spheres,
        triangles: vec![Triangle { vertices: [a, c, b], material: ground }, Triangle { vertices: [a, d, c], material: ground }],
        point_lights,
        directional_lights: Vec::new(),
        background: [0.55, 0.7, 0.9],
        ambient: [0.08; 3],
    };
    let camera = CameraSpec {
        position: Vec3::new(0.0, 1.0, 0.0),
        look_at: Vec3::new(0.0, 1.0, 6.0),
        up: Vec3::new(0.0, 1.0, 0.0),
        film_height_mm: 24.0,
        focal_length_mm: 24.0,
    };
    Ok(SceneFile { camera, scene })
}
