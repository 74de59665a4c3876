//! Explicit-microfacet ground truth: every grid vertex instantiates its own
//! microfacets with orientations drawn from the unprojected NDF.

use std::f64::consts::PI;

use crate::counting::RandomStream;
use crate::envmap::EnvironmentMap;
use crate::error::{Error, Result};
use crate::grid::GridVertexDraw;
use crate::math::{hammersley, spherical_direction, Frame, Vec3};

/// Largest expected microfacet count per footprint the reference accepts.
pub const DESK_SCALE_CAP: f64 = 1e4;
const INVERSE_CDF_SIZE: usize = 4096;
pub const EXPECTATION_SAMPLES: u32 = 4096;

/// Orientation sampler for `h ∝ D(h) / D_H` (solid-angle measure).
#[derive(Debug, Clone)]
pub struct UnprojectedGgx {
    alpha: f64,
    inverse_cdf: Vec<f64>,
}

impl UnprojectedGgx {
    pub fn new(alpha: f64) -> Self {
        let total = unprojected_mass(1.0, alpha);
        let inverse_cdf = (0..=INVERSE_CDF_SIZE)
            .map(|i| {
                let target = total * i as f64 / INVERSE_CDF_SIZE as f64;
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if unprojected_mass(mid, alpha) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        Self { alpha, inverse_cdf }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `D_H(α)` in closed form.
    pub fn total_area(&self) -> f64 {
        unprojected_mass(1.0, self.alpha)
    }

    /// Local-frame microfacet normal from two uniforms.
    pub fn sample(&self, u1: f64, u2: f64) -> Vec3 {
        let x = u1.clamp(0.0, 1.0) * INVERSE_CDF_SIZE as f64;
        let i = (x as usize).min(INVERSE_CDF_SIZE - 1);
        let t = x - i as f64;
        let cos = self.inverse_cdf[i] + (self.inverse_cdf[i + 1] - self.inverse_cdf[i]) * t;
        spherical_direction(cos, 2.0 * PI * u2)
    }
}

/// `∫₀ᵗ 2π D(c) dc`, the unprojected GGX mass with `cosθ_h ≤ t`.
pub fn unprojected_mass(t: f64, alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    let k2 = (1.0 - a2).max(0.0);
    let k = k2.sqrt();
    let atanh_term = if k < 1e-4 { t + k2 * t * t * t / 3.0 } else { (k * t).atanh() / k };
    a2 * (t / (1.0 - k2 * t * t) + atanh_term)
}

/// Luminance-only reflection oracle over the raw environment.
pub struct ReferenceShader<'a> {
    pub env: &'a EnvironmentMap,
    /// Azimuthal environment rotation, radians.
    pub env_rotation: f64,
    pub ggx: UnprojectedGgx,
}

impl<'a> ReferenceShader<'a> {
    pub fn new(env: &'a EnvironmentMap, env_rotation: f64, alpha: f64) -> Self {
        Self {
            env,
            env_rotation,
            ggx: UnprojectedGgx::new(alpha),
        }
    }

    pub fn check_cap(expected_count: f64) -> Result<()> {
        if expected_count > DESK_SCALE_CAP {
            return Err(Error::DeskScaleCap {
                expected: expected_count,
                cap: DESK_SCALE_CAP,
            });
        }
        Ok(())
    }

    /// Environment luminance reflected by a facet with local normal `h`;
    /// zero for back-facing facets or directions below the horizon.
    fn reflected_luminance(&self, frame: &Frame, wo: Vec3, h_local: Vec3) -> f64 {
        let h = frame.to_world(h_local);
        if h.dot(wo) <= 0.0 {
            return 0.0;
        }
        let wi = wo.reflect(h);
        if frame.normal.dot(wi) <= 0.0 {
            return 0.0;
        }
        self.env.lookup(wi.rotate_y(-self.env_rotation)).luminance()
    }

    /// `E[s]` for one facet with orientation drawn from `D / D_H`.
    pub fn expected_reflection(&self, normal: Vec3, wo: Vec3) -> f64 {
        let frame = Frame::from_normal(normal);
        let n = EXPECTATION_SAMPLES;
        (0..n)
            .map(|i| {
                let (u1, u2) = hammersley(i, n);
                self.reflected_luminance(&frame, wo, self.ggx.sample(u1, u2))
            })
            .sum::<f64>()
            / n as f64
    }

    /// `Σ_i w_i Σ_j s_ij / (E[N_P] · E[s])` with dithered per-vertex counts.
    pub fn modulation(
        &self,
        normal: Vec3,
        wo: Vec3,
        vertices: &[GridVertexDraw],
        expected_count: f64,
        expected_reflection: f64,
        seed: u64,
    ) -> f64 {
        let denom = expected_count * expected_reflection;
        if !(denom > 0.0) {
            return 0.0;
        }
        let frame = Frame::from_normal(normal);
        let stream = RandomStream::new(seed);
        let mut numer = 0.0;
        for v in vertices.iter().filter(|v| v.weight > 0.0) {
            let count = (v.count + stream.uniform(&[v.seed, u64::MAX])).floor() as u64;
            let mut sum = 0.0;
            for j in 0..count {
                let h = self.ggx.sample(stream.uniform(&[v.seed, j, 0]), stream.uniform(&[v.seed, j, 1]));
                sum += self.reflected_luminance(&frame, wo, h);
            }
            numer += v.weight * sum;
        }
        numer / denom
    }
}
