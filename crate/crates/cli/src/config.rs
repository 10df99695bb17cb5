//! `--config` JSON file and the rules for merging it with flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use vafr::acuity::AcuityModel;
use vafr::mapping::{compute_cr, ModelRef};
use vafr::{AaMode, DeltaSpec, MappingContext, OutsidePolicy};

use crate::Failure;

/// Every field is optional; a flag given on the command line wins.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Acuity model file (relative to the config file) or inline pivots.
    pub model: Option<ModelRef>,
    pub device_cap: Option<f64>,
    pub c_r: Option<f64>,
    pub film_height_mm: Option<f64>,
    pub focal_length_mm: Option<f64>,
    pub display: Option<[u32; 2]>,
    pub gaze: Option<[f64; 2]>,
    pub delta: Option<DeltaSpec>,
    pub aa_mode: Option<AaMode>,
    pub outside_policy: Option<OutsidePolicy>,
    pub out: Option<PathBuf>,
    pub dump_lp: Option<PathBuf>,
    pub stats_out: Option<PathBuf>,
    pub scene: Option<String>,
    #[serde(skip)]
    base_dir: Option<PathBuf>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, Failure> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let mut cfg: Config =
            serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("config {}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Resolves a path written in the config file against its directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }
}

/// Acuity flags shared by `foveate`, `render` and `buffer-stats`, merged
/// with the config file.
#[derive(Debug, Clone, Default)]
pub struct ModelOptions {
    pub acuity: Option<PathBuf>,
    pub device_cap: Option<f64>,
    pub delta: Option<DeltaSpec>,
}

pub fn load_model(cfg: &Config, opts: &ModelOptions) -> Result<AcuityModel, Failure> {
    let model = match (&opts.acuity, &cfg.model) {
        (Some(path), _) => read_model(path)?,
        (None, Some(ModelRef::Path(p))) => read_model(&cfg.resolve(Path::new(p)))?,
        (None, Some(ModelRef::Inline(inline))) => AcuityModel::from_config(inline)?,
        (None, None) => AcuityModel::default(),
    };
    match opts.device_cap.or(cfg.device_cap) {
        Some(cap) => Ok(model.adapt_to_device(cap)?),
        None => Ok(model),
    }
}

fn read_model(path: &Path) -> Result<AcuityModel, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    Ok(AcuityModel::from_json(&text)?)
}

/// `c_r` from, in order: `--cr`, `--film`/`--focal`, the config file, and
/// finally film height = focal length (`c_r = 1/H`).
pub fn resolve_cr(
    cfg: &Config,
    cr: Option<f64>,
    film: Option<f64>,
    focal: Option<f64>,
    display_h: u32,
) -> Result<f64, Failure> {
    if let Some(c) = cr {
        return Ok(c);
    }
    if film.is_none() && focal.is_none() {
        if let Some(c) = cfg.c_r {
            return Ok(c);
        }
    }
    let film = film.or(cfg.film_height_mm).unwrap_or(24.0);
    let focal = focal.or(cfg.focal_length_mm).unwrap_or(24.0);
    Ok(compute_cr(film, focal, f64::from(display_h))?)
}

pub fn build_context(
    model: AcuityModel,
    c_r: f64,
    display: (u32, u32),
    gaze: Option<(f64, f64)>,
    delta: DeltaSpec,
) -> Result<MappingContext, Failure> {
    let gaze = gaze.unwrap_or((f64::from(display.0) / 2.0, f64::from(display.1) / 2.0));
    Ok(MappingContext::new(model, c_r, display, gaze, delta)?)
}
