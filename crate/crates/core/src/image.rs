//! Row-major 8-bit RGB(A) raster with PNG/PPM I/O.

use std::path::Path;

use crate::error::{Result, VafrError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl Image {
    /// Black image. `channels` must be 3 or 4.
    pub fn new(width: u32, height: u32, channels: u8) -> Self {
        assert!(channels == 3 || channels == 4, "channels must be 3 or 4");
        let len = width as usize * height as usize * channels as usize;
        Image { width, height, channels, data: vec![0; len] }
    }

    pub fn from_raw(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self> {
        if channels != 3 && channels != 4 {
            return Err(VafrError::invalid("image", format!("{channels} channels, expected 3 or 4")));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(VafrError::invalid(
                "image",
                format!("data length {} does not match {width}x{height}x{channels}", data.len()),
            ));
        }
        Ok(Image { width, height, channels, data })
    }

    /// Solid-colour image.
    pub fn filled(width: u32, height: u32, rgba: [u8; 4], channels: u8) -> Self {
        let mut img = Image::new(width, height, channels);
        for px in img.data.chunks_exact_mut(channels as usize) {
            px.copy_from_slice(&rgba[..channels as usize]);
        }
        img
    }

    /// Loads PNG or PNM/PPM; grayscale inputs are expanded to RGB.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let dynimg = ::image::open(path).map_err(|source| map_image_err(path, source))?;
        let img = if dynimg.color().has_alpha() {
            let rgba = dynimg.into_rgba8();
            let (w, h) = rgba.dimensions();
            Image { width: w, height: h, channels: 4, data: rgba.into_raw() }
        } else {
            let rgb = dynimg.into_rgb8();
            let (w, h) = rgb.dimensions();
            Image { width: w, height: h, channels: 3, data: rgb.into_raw() }
        };
        Ok(img)
    }

    /// Saves as PNG, or as binary PPM for a `.ppm`/`.pnm` extension (alpha
    /// is dropped for PPM).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        let is_ppm = matches!(ext.as_deref(), Some("ppm" | "pnm"));
        let res = if is_ppm {
            let rgb = self.to_rgb();
            ::image::save_buffer_with_format(
                path,
                &rgb.data,
                self.width,
                self.height,
                ::image::ExtendedColorType::Rgb8,
                ::image::ImageFormat::Pnm,
            )
        } else {
            let color = if self.channels == 4 {
                ::image::ExtendedColorType::Rgba8
            } else {
                ::image::ExtendedColorType::Rgb8
            };
            ::image::save_buffer_with_format(path, &self.data, self.width, self.height, color, ::image::ImageFormat::Png)
        };
        res.map_err(|source| map_image_err(path, source))
    }

    pub fn width(&self) -> u32 {
        self.width
    }
    pub fn height(&self) -> u32 {
        self.height
    }
    pub fn channels(&self) -> u8 {
        self.channels
    }
    pub fn data(&self) -> &[u8] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    #[inline]
    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels as usize
    }

    pub fn rgb(&self, x: u32, y: u32) -> [u8; 3] {
        let o = self.offset(x, y);
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    pub fn put_rgb(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let o = self.offset(x, y);
        self.data[o..o + 3].copy_from_slice(&rgb);
    }

    /// Normalized RGBA; alpha is 1 for 3-channel images.
    #[inline]
    pub fn rgba_f32(&self, x: u32, y: u32) -> [f32; 4] {
        let o = self.offset(x, y);
        let d = &self.data[o..o + self.channels as usize];
        let a = if self.channels == 4 { d[3] } else { 255 };
        [d[0], d[1], d[2], a].map(|c| f32::from(c) / 255.0)
    }

    /// Bilinear sample at a continuous position (pixel centres at
    /// `k + 0.5`), clamped to the border.
    #[inline]
    pub fn sample_bilinear(&self, x: f64, y: f64) -> [f32; 4] {
        let max_x = (self.width - 1) as f64;
        let max_y = (self.height - 1) as f64;
        let fx = (x - 0.5).clamp(0.0, max_x);
        let fy = (y - 0.5).clamp(0.0, max_y);
        let x0 = fx.floor() as u32;
        let y0 = fy.floor() as u32;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let tx = (fx - f64::from(x0)) as f32;
        let ty = (fy - f64::from(y0)) as f32;
        let top = crate::lpbuffer::lerp4(self.rgba_f32(x0, y0), self.rgba_f32(x1, y0), tx);
        let bottom = crate::lpbuffer::lerp4(self.rgba_f32(x0, y1), self.rgba_f32(x1, y1), tx);
        crate::lpbuffer::lerp4(top, bottom, ty)
    }

    pub fn to_rgb(&self) -> Image {
        if self.channels == 3 {
            return self.clone();
        }
        let data = self.data.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect();
        Image { width: self.width, height: self.height, channels: 3, data }
    }
}

fn map_image_err(path: &Path, source: ::image::ImageError) -> VafrError {
    match source {
        ::image::ImageError::IoError(e) => VafrError::Io { path: path.to_path_buf(), source: e },
        other => VafrError::Image { path: path.to_path_buf(), source: other },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_length_is_checked() {
        assert!(Image::from_raw(2, 2, 3, vec![0; 12]).is_ok());
        assert!(Image::from_raw(2, 2, 3, vec![0; 11]).is_err());
        assert!(Image::from_raw(2, 2, 2, vec![0; 8]).is_err());
    }

    #[test]
    fn bilinear_hits_pixel_centres() {
        let mut img = Image::new(2, 1, 3);
        img.put_rgb(1, 0, [255, 255, 255]);
        assert_eq!(img.sample_bilinear(0.5, 0.5)[0], 0.0);
        assert_eq!(img.sample_bilinear(1.5, 0.5)[0], 1.0);
        assert!((img.sample_bilinear(1.0, 0.5)[0] - 0.5).abs() < 1e-6);
        assert_eq!(img.sample_bilinear(-50.0, 9.0)[0], 0.0);
    }

    #[test]
    fn png_and_ppm_roundtrip() {
        let dir = std::env::temp_dir().join(format!("vafr-img-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut img = Image::filled(3, 2, [10, 20, 30, 40], 4);
        img.put_rgb(2, 1, [1, 2, 3]);
        let png = dir.join("a.png");
        img.save(&png).unwrap();
        assert_eq!(Image::open(&png).unwrap(), img);
        let ppm = dir.join("a.ppm");
        img.save(&ppm).unwrap();
        assert_eq!(Image::open(&ppm).unwrap(), img.to_rgb());
        let missing = Image::open(dir.join("missing.png")).unwrap_err();
        assert_eq!(missing.exit_code(), 3);
        std::fs::remove_dir_all(dir).ok();
    }
}
