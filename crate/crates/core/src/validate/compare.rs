use std::path::Path;

use crate::error::{Error, Result};
use crate::render::ImageBuffer;

use super::report::{Bound, ReportLine, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub mean: f64,
    pub max: f64,
    pub pixels: usize,
}

/// Per-pixel luminance error `|a − b| / min(a, b)` over pixels whose larger
/// luminance exceeds `floor`; the denominator is bounded below by
/// `max(floor, 1e-12)`.
pub fn relative_error(a: &ImageBuffer, b: &ImageBuffer, floor: f64) -> Result<ErrorStats> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let (la, lb) = (a.luminance(), b.luminance());
    let mut stats = ErrorStats {
        mean: 0.0,
        max: 0.0,
        pixels: 0,
    };
    for (x, y) in la.iter().zip(&lb) {
        if x.max(*y) <= floor {
            continue;
        }
        let e = (x - y).abs() / x.min(*y).max(floor).max(1e-12);
        stats.mean += e;
        stats.max = stats.max.max(e);
        stats.pixels += 1;
    }
    if stats.pixels > 0 {
        stats.mean /= stats.pixels as f64;
    }
    Ok(stats)
}

/// Mean relative deviation of `img` from `reference` on masked pixels with
/// reference luminance above `floor`.
pub fn masked_relative_error(img: &[f64], reference: &[f64], mask: &[bool], floor: f64) -> ErrorStats {
    let mut stats = ErrorStats {
        mean: 0.0,
        max: 0.0,
        pixels: 0,
    };
    for ((v, r), m) in img.iter().zip(reference).zip(mask) {
        if !*m || *r <= floor {
            continue;
        }
        let e = (v - r).abs() / r;
        stats.mean += e;
        stats.max = stats.max.max(e);
        stats.pixels += 1;
    }
    if stats.pixels > 0 {
        stats.mean /= stats.pixels as f64;
    }
    stats
}

/// Pixels of `img` brighter than twice the smooth image.
pub fn glint_mask(img: &[f64], smooth: &[f64], mask: &[bool]) -> Vec<bool> {
    img.iter()
        .zip(smooth)
        .zip(mask)
        .map(|((v, s), m)| *m && *s > 0.0 && *v > 2.0 * s)
        .collect()
}

/// Share of masked pixels that are glint pixels.
pub fn glint_fraction(img: &[f64], smooth: &[f64], mask: &[bool]) -> f64 {
    let hits = glint_mask(img, smooth, mask).iter().filter(|g| **g).count();
    let total = mask.iter().filter(|m| **m).count();
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

/// `1 − |A ∩ B| / |A ∪ B|`; zero when both sets are empty.
pub fn jaccard_distance(a: &[bool], b: &[bool]) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (x, y) in a.iter().zip(b) {
        inter += (*x && *y) as usize;
        union += (*x || *y) as usize;
    }
    if union == 0 {
        0.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

pub fn compare_images(a: &ImageBuffer, b: &ImageBuffer, threshold: f64, floor: f64) -> Result<ValidationReport> {
    let stats = relative_error(a, b, floor)?;
    let mut r = ValidationReport::new(format!("compare floor={floor} pixels={}", stats.pixels));
    r.push(ReportLine::new("compare", "mean_rel_err", stats.mean, Bound::Below, threshold));
    r.note(format!("max relative error {:.6e}", stats.max));
    Ok(r)
}

pub fn compare_files(a: &Path, b: &Path, threshold: f64, floor: f64) -> Result<ValidationReport> {
    compare_images(&ImageBuffer::read_pfm(a)?, &ImageBuffer::read_pfm(b)?, threshold, floor)
}
