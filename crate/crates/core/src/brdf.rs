//! Isotropic GGX microfacet reflectance and the integrated quantities that
//! normalise the glint model: total microfacet area `D_H(α)`, visible
//! reflecting microfacet area `E_D(cosθ_o, α)` and the split-sum
//! Fresnel scale/bias table.
//!
//! Tables are parameterised over `(cosθ_o, √α)` and looked up bilinearly.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::math::{hammersley, spherical_direction, Rgb, Vec3};

/// Surface description shared by every shading mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceMaterial {
    /// GGX roughness α (not √α).
    pub alpha: f64,
    /// Normal-incidence Fresnel reflectance.
    pub f0: Rgb,
    /// Natural log of the microfacet count per unit surface patch.
    pub log_n0: f64,
    /// Linear multiplier on the microfacet count.
    pub density_scale: f64,
}

impl SurfaceMaterial {
    /// Build from the perceptual roughness √α used by configs.
    pub fn from_sqrt_alpha(sqrt_alpha: f64, f0: Rgb, log_n0: f64, density_scale: f64) -> Result<Self> {
        let m = Self {
            alpha: sqrt_alpha * sqrt_alpha,
            f0,
            log_n0,
            density_scale,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config("material.sqrt_alpha", "roughness must be in (0, 1]"));
        }
        for c in [self.f0.r, self.f0.g, self.f0.b] {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::config("material.f0", "components must lie in [0, 1]"));
            }
        }
        if !(self.density_scale > 0.0 && self.density_scale.is_finite()) {
            return Err(Error::config("material.density_scale", "must be positive"));
        }
        if !self.log_n0.is_finite() {
            return Err(Error::config("material.log_n0", "must be finite"));
        }
        Ok(())
    }

    pub fn sqrt_alpha(&self) -> f64 {
        self.alpha.sqrt()
    }

    /// Expected microfacet count `ρ_N · N₀` per unit patch.
    pub fn microfacets_per_patch(&self) -> f64 {
        self.density_scale * self.log_n0.exp()
    }
}

/// GGX / Trowbridge-Reitz normal distribution.
pub fn ggx_ndf(cos_theta_h: f64, alpha: f64) -> f64 {
    if cos_theta_h < 0.0 {
        return 0.0;
    }
    let a2 = alpha * alpha;
    let c2 = cos_theta_h * cos_theta_h;
    let d = c2 * (a2 - 1.0) + 1.0;
    a2 / (PI * d * d)
}

/// Smith Λ for GGX.
pub fn smith_lambda(cos_theta: f64, alpha: f64) -> f64 {
    let c2 = (cos_theta * cos_theta).min(1.0);
    if c2 <= 0.0 {
        return f64::INFINITY;
    }
    let tan2 = (1.0 - c2) / c2;
    0.5 * (-1.0 + (1.0 + alpha * alpha * tan2).sqrt())
}

/// Height-correlated Smith masking-shadowing.
pub fn smith_g(cos_theta_i: f64, cos_theta_o: f64, alpha: f64) -> f64 {
    1.0 / (1.0 + smith_lambda(cos_theta_i, alpha) + smith_lambda(cos_theta_o, alpha))
}

pub fn schlick_fresnel(f0: Rgb, cos_theta: f64) -> Rgb {
    let m = (1.0 - cos_theta.clamp(0.0, 1.0)).powi(5);
    Rgb::new(
        f0.r + (1.0 - f0.r) * m,
        f0.g + (1.0 - f0.g) * m,
        f0.b + (1.0 - f0.b) * m,
    )
}

/// BRDF times the incident cosine, `F·G·D / (4 (n·ω_o))`.
pub fn eval_smooth_brdf(wi: Vec3, wo: Vec3, n: Vec3, material: &SurfaceMaterial) -> Rgb {
    let cos_i = n.dot(wi);
    let cos_o = n.dot(wo);
    if cos_i <= 0.0 || cos_o <= 0.0 {
        return Rgb::BLACK;
    }
    let h = (wi + wo).normalized();
    let d = ggx_ndf(n.dot(h), material.alpha);
    let g = smith_g(cos_i, cos_o, material.alpha);
    let f = schlick_fresnel(material.f0, h.dot(wo));
    f * (g * d / (4.0 * cos_o))
}

/// Half-vector sample in the local frame with density `D(h)·cosθ_h`.
pub fn sample_ggx_half(u1: f64, u2: f64, alpha: f64) -> Vec3 {
    let a2 = alpha * alpha;
    let cos2 = (1.0 - u1) / (1.0 + (a2 - 1.0) * u1);
    spherical_direction(cos2.max(0.0).sqrt(), 2.0 * PI * u2)
}

/// Smallest roughness the tables evaluate at; the `√α = 0` row uses this.
const MIN_TABLE_ALPHA: f64 = 1e-4;
/// Smallest view cosine the tables evaluate at; the `cosθ_o = 0` column uses this.
const MIN_TABLE_COS: f64 = 1e-3;

const CACHE_MAGIC: &[u8; 4] = b"GIBL";
const CACHE_VERSION: u32 = 1;

/// Precomputed albedo-style integrals of the GGX lobe.
#[derive(Debug, Clone, PartialEq)]
pub struct AlbedoTables {
    cos_res: usize,
    alpha_res: usize,
    /// `D_H` indexed by √α.
    d_total: Vec<f32>,
    /// `E_D`, row-major with √α rows and cosθ_o columns.
    d_visible: Vec<f32>,
    scale: Vec<f32>,
    bias: Vec<f32>,
}

/// Table resolution over `(cosθ_o, √α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableResolution {
    pub cos_theta: usize,
    pub sqrt_alpha: usize,
}

impl Default for TableResolution {
    fn default() -> Self {
        Self {
            cos_theta: 64,
            sqrt_alpha: 64,
        }
    }
}

pub const DEFAULT_TABLE_SAMPLES: u32 = 1 << 14;

/// `D_H(α) = ∫_H D(h) dh`.
///
/// Substituting the GGX sampling variable `ξ = 1 − s²` turns the integrand
/// into `2·sqrt(α² + (1 − α²) s²)`, which is smooth on `[0, 1]`.
pub fn total_microfacet_area(alpha: f64, samples: u32) -> f64 {
    let a2 = alpha * alpha;
    let n = samples as f64;
    (0..samples)
        .map(|i| {
            let s = (i as f64 + 0.5) / n;
            2.0 * (a2 + (1.0 - a2) * s * s).sqrt()
        })
        .sum::<f64>()
        / n
}

/// `E_D(cosθ_o, α)` and the split-sum `(scale, bias)` pair by GGX importance sampling.
pub fn visible_area_and_split_sum(cos_theta_o: f64, alpha: f64, samples: u32) -> (f64, f64, f64) {
    let cos_o = cos_theta_o.clamp(MIN_TABLE_COS, 1.0);
    let wo = Vec3::new((1.0 - cos_o * cos_o).max(0.0).sqrt(), 0.0, cos_o);
    let (mut visible, mut scale, mut bias) = (0.0, 0.0, 0.0);
    for i in 0..samples {
        let (u1, u2) = hammersley(i, samples);
        let h = sample_ggx_half(u1, u2, alpha);
        let o_dot_h = wo.dot(h);
        if o_dot_h <= 0.0 || h.z <= 0.0 {
            continue;
        }
        let wi = wo.reflect(h);
        if wi.z <= 0.0 {
            continue;
        }
        visible += 1.0 / h.z;
        let g_vis = smith_g(wi.z, cos_o, alpha) * o_dot_h / (h.z * cos_o);
        let fc = (1.0 - o_dot_h).powi(5);
        scale += (1.0 - fc) * g_vis;
        bias += fc * g_vis;
    }
    let n = samples as f64;
    (visible / n, scale / n, bias / n)
}

impl AlbedoTables {
    pub fn build(resolution: TableResolution, quadrature_samples: u32) -> Result<Self> {
        let cos_res = resolution.cos_theta.max(16);
        let alpha_res = resolution.sqrt_alpha.max(16);
        let samples = quadrature_samples.max(DEFAULT_TABLE_SAMPLES);

        let d_total: Vec<f32> = (0..alpha_res)
            .map(|j| total_microfacet_area(node_alpha(j, alpha_res), samples) as f32)
            .collect();

        let cells: Vec<(f64, f64, f64)> = (0..alpha_res * cos_res)
            .into_par_iter()
            .map(|idx| {
                let (j, i) = (idx / cos_res, idx % cos_res);
                let cos_o = i as f64 / (cos_res - 1) as f64;
                visible_area_and_split_sum(cos_o, node_alpha(j, alpha_res), samples)
            })
            .collect();

        let mut tables = Self {
            cos_res,
            alpha_res,
            d_total,
            d_visible: cells.iter().map(|c| c.0 as f32).collect(),
            scale: cells.iter().map(|c| c.1 as f32).collect(),
            bias: cells.iter().map(|c| c.2 as f32).collect(),
        };
        tables.check_finite()?;
        // E_D ≤ D_H and scale + bias ≤ 1 hold analytically; remove quadrature noise.
        for j in 0..alpha_res {
            let cap = tables.d_total[j];
            for v in &mut tables.d_visible[j * cos_res..(j + 1) * cos_res] {
                *v = v.min(cap);
            }
        }
        for (s, b) in tables.scale.iter_mut().zip(tables.bias.iter_mut()) {
            let sum = *s + *b;
            if sum > 1.0 {
                *s /= sum;
                *b /= sum;
            }
        }
        Ok(tables)
    }

    fn check_finite(&self) -> Result<()> {
        let ok = |v: &[f32]| v.iter().all(|x| x.is_finite() && *x >= 0.0);
        if !ok(&self.d_total) {
            return Err(Error::NonFiniteQuadrature("d_total"));
        }
        if !ok(&self.d_visible) {
            return Err(Error::NonFiniteQuadrature("d_visible"));
        }
        if !ok(&self.scale) || !ok(&self.bias) {
            return Err(Error::NonFiniteQuadrature("fresnel_split"));
        }
        Ok(())
    }

    pub fn resolution(&self) -> TableResolution {
        TableResolution {
            cos_theta: self.cos_res,
            sqrt_alpha: self.alpha_res,
        }
    }

    /// `D_H(α)`.
    pub fn d_total(&self, alpha: f64) -> f64 {
        let y = alpha.max(0.0).sqrt().min(1.0) * (self.alpha_res - 1) as f64;
        let j = (y.floor() as usize).min(self.alpha_res - 2);
        let t = y - j as f64;
        lerp(self.d_total[j] as f64, self.d_total[j + 1] as f64, t)
    }

    /// `E_D(cosθ_o, α)`.
    pub fn d_visible(&self, cos_theta_o: f64, alpha: f64) -> f64 {
        self.bilinear(&self.d_visible, cos_theta_o, alpha)
    }

    /// Split-sum `(scale, bias)`: directional albedo is `f0·scale + bias`.
    pub fn fresnel_split(&self, cos_theta_o: f64, alpha: f64) -> (f64, f64) {
        (
            self.bilinear(&self.scale, cos_theta_o, alpha),
            self.bilinear(&self.bias, cos_theta_o, alpha),
        )
    }

    pub fn directional_albedo(&self, f0: Rgb, cos_theta_o: f64, alpha: f64) -> Rgb {
        let (scale, bias) = self.fresnel_split(cos_theta_o, alpha);
        f0 * scale + Rgb::splat(bias)
    }

    fn bilinear(&self, table: &[f32], cos_theta_o: f64, alpha: f64) -> f64 {
        let x = cos_theta_o.clamp(0.0, 1.0) * (self.cos_res - 1) as f64;
        let y = alpha.max(0.0).sqrt().min(1.0) * (self.alpha_res - 1) as f64;
        let i = (x.floor() as usize).min(self.cos_res - 2);
        let j = (y.floor() as usize).min(self.alpha_res - 2);
        let (tx, ty) = (x - i as f64, y - j as f64);
        let at = |i: usize, j: usize| table[j * self.cos_res + i] as f64;
        lerp(
            lerp(at(i, j), at(i + 1, j), tx),
            lerp(at(i, j + 1), at(i + 1, j + 1), tx),
            ty,
        )
    }

    /// Serialise to the `GIBL` cache layout (little-endian).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * (self.d_total.len() + 3 * self.d_visible.len()));
        out.extend_from_slice(CACHE_MAGIC);
        out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.cos_res as u32).to_le_bytes());
        out.extend_from_slice(&(self.alpha_res as u32).to_le_bytes());
        for block in [&self.d_total, &self.d_visible, &self.scale, &self.bias] {
            for v in block.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = || Error::CacheMismatch("GIBL");
        if bytes.len() < 16 || &bytes[..4] != CACHE_MAGIC {
            return Err(bad());
        }
        let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
        if word(4) != CACHE_VERSION {
            return Err(bad());
        }
        let (cos_res, alpha_res) = (word(8) as usize, word(12) as usize);
        if cos_res < 2 || alpha_res < 2 {
            return Err(bad());
        }
        let cells = cos_res * alpha_res;
        let floats = alpha_res + 3 * cells;
        if bytes.len() != 16 + 4 * floats {
            return Err(bad());
        }
        let mut values = bytes[16..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()));
        let mut take = |n: usize| values.by_ref().take(n).collect::<Vec<f32>>();
        let tables = Self {
            cos_res,
            alpha_res,
            d_total: take(alpha_res),
            d_visible: take(cells),
            scale: take(cells),
            bias: take(cells),
        };
        tables.check_finite()?;
        Ok(tables)
    }

    /// Read the cache at `path`, rebuilding (and rewriting) it when absent,
    /// unreadable or built for another resolution.
    pub fn load_or_build(path: &Path, resolution: TableResolution, quadrature_samples: u32) -> Result<Self> {
        if let Ok(bytes) = fs::read(path) {
            if let Ok(tables) = Self::from_bytes(&bytes) {
                if tables.resolution() == resolution {
                    return Ok(tables);
                }
            }
        }
        let tables = Self::build(resolution, quadrature_samples)?;
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(&tables.to_bytes()).map_err(|e| Error::io(path, e))?;
        Ok(tables)
    }
}

fn node_alpha(j: usize, res: usize) -> f64 {
    let s = j as f64 / (res - 1) as f64;
    (s * s).max(MIN_TABLE_ALPHA)
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}
