//! Equirectangular environments, radiance levels and GGX prefiltering.

mod io;
mod levels;
mod prefilter;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{Rgb, Vec3};

pub use io::{load_envmap, read_pfm, write_pfm, PfmImage};
pub use levels::{compute_levels, fuzzy_weights, fuzzy_weights_into, RadianceLevels, WeightSpace};
pub use prefilter::{
    filter_direction, prefilter, MipLevel, PrefilterOptions, PrefilteredEnv, DEFAULT_MIP_COUNT, DEFAULT_SAMPLES_PER_TEXEL,
};

/// Rec.709 luminance.
pub fn luminance(rgb: Rgb) -> f64 {
    rgb.luminance()
}

/// Map a unit direction (y up) to equirectangular `(u, v) ∈ [0,1)²`, `v = 0` at the zenith.
pub fn direction_to_uv(d: Vec3) -> (f64, f64) {
    let u = 0.5 + d.x.atan2(-d.z) / (2.0 * PI);
    let v = d.y.clamp(-1.0, 1.0).acos() / PI;
    (u.rem_euclid(1.0), v)
}

pub fn uv_to_direction(u: f64, v: f64) -> Vec3 {
    let theta = v * PI;
    let phi = (u - 0.5) * 2.0 * PI;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * sp, ct, -st * cp)
}

/// Bilinear sample of an interleaved equirect grid with `channels` floats per
/// texel, wrapping in longitude and clamping in latitude. Writes into `out`.
pub(crate) fn bilinear_equirect(data: &[f32], width: usize, height: usize, channels: usize, u: f64, v: f64, out: &mut [f64]) {
    let x = u * width as f64 - 0.5;
    let y = v * height as f64 - 0.5;
    let (x0, y0) = (x.floor(), y.floor());
    let (tx, ty) = (x - x0, y - y0);
    let xa = (x0 as i64).rem_euclid(width as i64) as usize;
    let xb = (xa + 1) % width;
    let last = height as i64 - 1;
    let ya = (y0 as i64).clamp(0, last) as usize;
    let yb = (y0 as i64 + 1).clamp(0, last) as usize;
    let w = [(1.0 - tx) * (1.0 - ty), tx * (1.0 - ty), (1.0 - tx) * ty, tx * ty];
    let idx = [ya * width + xa, ya * width + xb, yb * width + xa, yb * width + xb];
    out[..channels].fill(0.0);
    for (wt, i) in w.iter().zip(idx) {
        if *wt == 0.0 {
            continue;
        }
        let texel = &data[i * channels..(i + 1) * channels];
        for (o, t) in out.iter_mut().zip(texel) {
            *o += wt * *t as f64;
        }
    }
}

/// Linear RGB radiance on a `2:1` longitude × latitude grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentMap {
    width: usize,
    height: usize,
    texels: Vec<f32>,
}

impl EnvironmentMap {
    /// Validate and wrap row-major RGB texels (top row first).
    pub fn from_texels(width: usize, height: usize, texels: Vec<f32>) -> Result<Self> {
        if height == 0 || width != 2 * height {
            return Err(Error::NotEquirectangular { width, height });
        }
        if texels.len() != width * height * 3 {
            return Err(Error::MalformedHeader(format!(
                "expected {} floats, found {}",
                width * height * 3,
                texels.len()
            )));
        }
        if let Some(i) = texels.iter().position(|t| !t.is_finite() || *t < 0.0) {
            let p = i / 3;
            return Err(Error::InvalidTexel { x: p % width, y: p / width });
        }
        Ok(Self { width, height, texels })
    }

    pub fn constant(height: usize, value: Rgb) -> Self {
        Self::from_fn(height, |_| value)
    }

    /// Evaluate `f` at every texel centre direction.
    pub fn from_fn(height: usize, f: impl Fn(Vec3) -> Rgb) -> Self {
        let width = 2 * height;
        let mut texels = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                let c = f(texel_direction(x, y, width, height));
                texels.extend_from_slice(&c.to_f32());
            }
        }
        Self::from_texels(width, height, texels).expect("generator must yield finite non-negative radiance")
    }

    /// Three constant regions: a warm sun disc, a blue sky and a dark ground.
    pub fn three_region(height: usize) -> Self {
        let sun = Vec3::new(0.55, 0.55, -0.63).normalized();
        Self::from_fn(height, |d| {
            if d.dot(sun) > 0.94 {
                Rgb::new(24.0, 20.0, 16.0)
            } else if d.y > 0.0 {
                Rgb::new(0.5, 0.7, 1.0)
            } else {
                Rgb::new(0.04, 0.035, 0.03)
            }
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn texels(&self) -> &[f32] {
        &self.texels
    }

    pub fn texel(&self, x: usize, y: usize) -> Rgb {
        let i = 3 * (y * self.width + x);
        Rgb::new(self.texels[i] as f64, self.texels[i + 1] as f64, self.texels[i + 2] as f64)
    }

    pub fn texel_direction(&self, x: usize, y: usize) -> Vec3 {
        texel_direction(x, y, self.width, self.height)
    }

    pub fn luminances(&self) -> impl Iterator<Item = f64> + '_ {
        self.texels
            .chunks_exact(3)
            .map(|c| Rgb::new(c[0] as f64, c[1] as f64, c[2] as f64).luminance())
    }

    /// Bilinear radiance in direction `d`.
    pub fn lookup(&self, d: Vec3) -> Rgb {
        let (u, v) = direction_to_uv(d);
        let mut c = [0.0; 3];
        bilinear_equirect(&self.texels, self.width, self.height, 3, u, v, &mut c);
        Rgb::new(c[0], c[1], c[2])
    }

    /// Nearest-texel radiance in direction `d`.
    pub fn lookup_nearest(&self, d: Vec3) -> Rgb {
        let (u, v) = direction_to_uv(d);
        let x = ((u * self.width as f64) as usize).min(self.width - 1);
        let y = ((v * self.height as f64) as usize).min(self.height - 1);
        self.texel(x, y)
    }

    /// Bilinear resample to a new height (width follows).
    pub fn resampled(&self, height: usize) -> Self {
        if height == self.height {
            return self.clone();
        }
        Self::from_fn(height, |d| self.lookup(d))
    }

    pub fn scaled(&self, factor: f32) -> Self {
        Self {
            width: self.width,
            height: self.height,
            texels: self.texels.iter().map(|t| t * factor).collect(),
        }
    }
}

pub(crate) fn texel_direction(x: usize, y: usize, width: usize, height: usize) -> Vec3 {
    uv_to_direction((x as f64 + 0.5) / width as f64, (y as f64 + 0.5) / height as f64)
}
