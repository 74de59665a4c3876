//! Radiance `.hdr` and PFM input, PFM output.

use std::fs;
use std::io::{BufReader, Cursor};
use std::path::Path;

use super::EnvironmentMap;
use crate::error::{Error, Result};

/// Linear RGB float image, rows stored top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct PfmImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

/// Load an equirectangular environment from `.hdr` (RGBE) or PFM, detected by
/// file signature.
pub fn load_envmap(path: &Path) -> Result<EnvironmentMap> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let img = if bytes.starts_with(b"#?") {
        decode_hdr(&bytes)?
    } else if bytes.starts_with(b"PF") || bytes.starts_with(b"Pf") {
        parse_pfm(&bytes)?
    } else {
        return Err(Error::UnsupportedFormat(path.display().to_string()));
    };
    EnvironmentMap::from_texels(img.width, img.height, img.data)
}

fn decode_hdr(bytes: &[u8]) -> Result<PfmImage> {
    let decoder = image::codecs::hdr::HdrDecoder::new(BufReader::new(Cursor::new(bytes)))
        .map_err(|e| Error::MalformedHeader(e.to_string()))?;
    let img = image::DynamicImage::from_decoder(decoder).map_err(|e| Error::MalformedHeader(e.to_string()))?;
    let rgb = img.into_rgb32f();
    Ok(PfmImage {
        width: rgb.width() as usize,
        height: rgb.height() as usize,
        data: rgb.into_raw(),
    })
}

pub fn read_pfm(path: &Path) -> Result<PfmImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pfm(&bytes)
}

fn parse_pfm(bytes: &[u8]) -> Result<PfmImage> {
    let bad = |m: &str| Error::MalformedHeader(format!("pfm: {m}"));
    // Header: three whitespace-separated tokens after the magic, then one byte.
    let mut tokens = Vec::with_capacity(4);
    let mut pos = 0;
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        tokens.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ascii header"))?);
    }
    pos += 1;
    let channels = match tokens[0] {
        "PF" => 3,
        "Pf" => 1,
        _ => return Err(bad("magic")),
    };
    let width: usize = tokens[1].parse().map_err(|_| bad("width"))?;
    let height: usize = tokens[2].parse().map_err(|_| bad("height"))?;
    let scale: f32 = tokens[3].parse().map_err(|_| bad("scale"))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(bad("scale"));
    }
    let little = scale < 0.0;
    let count = width * height * channels;
    let body = bytes.get(pos..pos + 4 * count).ok_or_else(|| bad("truncated data"))?;
    let values: Vec<f32> = body
        .chunks_exact(4)
        .map(|c| {
            let b: [u8; 4] = c.try_into().unwrap();
            if little {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            }
        })
        .collect();
    let mut data = Vec::with_capacity(width * height * 3);
    for row in (0..height).rev() {
        for v in values[row * width * channels..(row + 1) * width * channels].chunks_exact(channels) {
            if channels == 3 {
                data.extend_from_slice(v);
            } else {
                data.extend_from_slice(&[v[0]; 3]);
            }
        }
    }
    Ok(PfmImage { width, height, data })
}

/// Write little-endian RGB PFM.
pub fn write_pfm(path: &Path, image: &PfmImage) -> Result<()> {
    let mut out = format!("PF\n{} {}\n-1.0\n", image.width, image.height).into_bytes();
    out.reserve(image.data.len() * 4);
    let stride = image.width * 3;
    for row in (0..image.height).rev() {
        for v in &image.data[row * stride..(row + 1) * stride] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
