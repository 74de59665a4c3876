use std::path::Path;

use crate::envmap::{read_pfm, write_pfm, PfmImage};
use crate::error::{Error, Result};
use crate::math::Rgb;

/// Linear RGB image, rows top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height * 3],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        let i = 3 * (y * self.width + x);
        Rgb::new(self.data[i] as f64, self.data[i + 1] as f64, self.data[i + 2] as f64)
    }

    pub fn set(&mut self, x: usize, y: usize, c: Rgb) {
        let i = 3 * (y * self.width + x);
        self.data[i..i + 3].copy_from_slice(&c.to_f32());
    }

    pub fn pixels(&self) -> impl Iterator<Item = Rgb> + '_ {
        self.data
            .chunks_exact(3)
            .map(|c| Rgb::new(c[0] as f64, c[1] as f64, c[2] as f64))
    }

    pub fn luminance(&self) -> Vec<f64> {
        self.pixels().map(Rgb::luminance).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn read_pfm(path: &Path) -> Result<Self> {
        let PfmImage { width, height, data } = read_pfm(path)?;
        Ok(Self { width, height, data })
    }

    pub fn write_pfm(&self, path: &Path) -> Result<()> {
        write_pfm(
            path,
            &PfmImage {
                width: self.width,
                height: self.height,
                data: self.data.clone(),
            },
        )
    }

    /// 8-bit sRGB PNG of `clamp(linear · 2^stops)`.
    pub fn write_png(&self, path: &Path, exposure_stops: f64) -> Result<()> {
        let scale = exposure_stops.exp2();
        let bytes: Vec<u8> = self.data.iter().map(|&v| srgb_byte(v as f64 * scale)).collect();
        let img = image::RgbImage::from_raw(self.width as u32, self.height as u32, bytes)
            .ok_or_else(|| Error::Encode("buffer size".into()))?;
        img.save_with_format(path, image::ImageFormat::Png).map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::Encode(other.to_string()),
        })
    }
}

/// sRGB-encoded 8-bit value of a linear intensity, clamped to `[0, 1]`.
pub fn srgb_byte(linear: f64) -> u8 {
    let c = if linear.is_nan() { 0.0 } else { linear.clamp(0.0, 1.0) };
    let e = if c <= 0.003_130_8 { 12.92 * c } else { 1.055 * c.powf(1.0 / 2.4) - 0.055 };
    (e * 255.0).round() as u8
}

/// Write `img` as PNG or PFM according to the extension of `path`.
pub fn tonemap_write(img: &ImageBuffer, exposure_stops: f64, path: &Path) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("pfm") => img.write_pfm(path),
        Some("png") => img.write_png(path, exposure_stops),
        _ => Err(Error::UnsupportedFormat(path.display().to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn srgb_bytes() {
        assert_eq!(srgb_byte(1.0), 255);
        assert_eq!(srgb_byte(0.5 * (-1.0f64).exp2()), 137);
        assert_eq!(srgb_byte(0.0), 0);
        assert_eq!(srgb_byte(7.0), 255);
    }

    #[test]
    fn png_and_pfm_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut img = ImageBuffer::new(4, 2);
        img.set(1, 0, Rgb::new(0.5, 1.0, 0.1234567));
        img.set(3, 1, Rgb::new(1e-7, 3.5, 0.0));
        let pfm = dir.path().join("a.pfm");
        tonemap_write(&img, 0.0, &pfm).unwrap();
        assert_eq!(ImageBuffer::read_pfm(&pfm).unwrap(), img);

        let png = dir.path().join("a.png");
        tonemap_write(&img, -1.0, &png).unwrap();
        let back = image::open(&png).unwrap().into_rgb8();
        assert_eq!(back.get_pixel(1, 0).0, [137, srgb_byte(0.5), srgb_byte(0.1234567 * 0.5)]);
        assert!(tonemap_write(&img, 0.0, &dir.path().join("a.tiff")).is_err());
    }
}
