use crate::brdf::{AlbedoTables, SurfaceMaterial};
use crate::counting::{dual_gated_matched, RandomStream};
use crate::envmap::PrefilteredEnv;
use crate::grid::{aggregate_modulation, grid_vertices, GridVertexDraw};
use crate::math::{Rgb, Vec3};

use super::scene::SurfaceHit;

/// Read-only inputs shared by every smooth or glint shading call.
#[derive(Clone, Copy)]
pub struct ShadingContext<'a> {
    pub material: &'a SurfaceMaterial,
    pub penv: &'a PrefilteredEnv,
    pub tables: &'a AlbedoTables,
    /// Azimuthal environment rotation, radians.
    pub env_rotation: f64,
}

impl ShadingContext<'_> {
    fn env_dir(&self, d: Vec3) -> Vec3 {
        d.rotate_y(-self.env_rotation)
    }
}

/// Split-sum smooth reflection `(f0·scale + bias) ⊙ L_pref(ω_r, α)`.
pub fn shade_smooth(hit: &SurfaceHit, ctx: &ShadingContext, weights: &mut [f64]) -> Rgb {
    let m = ctx.material;
    let cos_o = hit.cos_o();
    let radiance = ctx.penv.sample_into(ctx.env_dir(hit.reflected()), m.alpha, weights);
    ctx.tables.directional_albedo(m.f0, cos_o, m.alpha).mul_elem(radiance)
}

/// `p_k = E_D w̄_k / D_H` for `k = 1..K` followed by the dummy remainder;
/// `weights` must hold the filtered weights at the reflected direction.
pub fn reflection_probs_from_weights(cos_o: f64, alpha: f64, tables: &AlbedoTables, weights: &[f64], out: &mut Vec<f64>) {
    let scale = tables.d_visible(cos_o, alpha) / tables.d_total(alpha);
    out.clear();
    out.extend(weights.iter().map(|w| (w * scale).max(0.0)));
    let sum: f64 = out.iter().sum();
    if sum > 1.0 {
        out.iter_mut().for_each(|p| *p /= sum);
    }
    out.push((1.0 - sum).max(0.0));
}

pub fn reflection_probs(hit: &SurfaceHit, ctx: &ShadingContext) -> Vec<f64> {
    let mut w = vec![0.0; ctx.penv.k()];
    ctx.penv.sample_into(ctx.env_dir(hit.reflected()), ctx.material.alpha, &mut w);
    let mut out = Vec::with_capacity(w.len() + 1);
    reflection_probs_from_weights(hit.cos_o(), ctx.material.alpha, ctx.tables, &w, &mut out);
    out
}

/// Glint shading: smooth radiance modulated by the aggregated multinomial
/// draw of the footprint's grid vertices.
pub fn shade_glint(hit: &SurfaceHit, ctx: &ShadingContext, seed: u64) -> Rgb {
    let mut w = vec![0.0; ctx.penv.k()];
    let smooth = shade_smooth(hit, ctx, &mut w);
    let mut probs = Vec::with_capacity(w.len() + 1);
    reflection_probs_from_weights(hit.cos_o(), ctx.material.alpha, ctx.tables, &w, &mut probs);
    let vertices = grid_vertices(&hit.footprint, ctx.material);
    let expected = hit.footprint.expected_count(ctx.material);
    smooth * aggregate_modulation(&vertices, ctx.penv.levels().values(), &probs, expected, &RandomStream::new(seed))
}

/// GGX half-vector mass within `gamma` of the normal,
/// `sin²γ / ((α² − 1) cos²γ + 1)`.
pub fn const_p_probability(gamma_deg: f64, alpha: f64) -> f64 {
    let (s, c) = gamma_deg.to_radians().sin_cos();
    if gamma_deg >= 90.0 {
        return 1.0;
    }
    (s * s / ((alpha * alpha - 1.0) * c * c + 1.0)).clamp(0.0, 1.0)
}

/// Environment-independent single-bin modulation.
pub fn const_p_modulation(vertices: &[GridVertexDraw], p: f64, expected_count: f64, stream: &RandomStream) -> f64 {
    let denom = expected_count * p;
    if !(denom > 0.0) {
        return 0.0;
    }
    let mut numer = 0.0;
    for v in vertices.iter().filter(|v| v.weight > 0.0) {
        let o = dual_gated_matched(v.count, p, stream.uniform(&[v.seed, 1, 0]), stream.uniform(&[v.seed, 1, 1]), None);
        numer += v.weight * o.n_pos;
    }
    numer / denom
}

pub fn shade_const_p(hit: &SurfaceHit, ctx: &ShadingContext, gamma_deg: f64, seed: u64) -> Rgb {
    let mut w = vec![0.0; ctx.penv.k()];
    let smooth = shade_smooth(hit, ctx, &mut w);
    let p = const_p_probability(gamma_deg, ctx.material.alpha);
    let vertices = grid_vertices(&hit.footprint, ctx.material);
    let expected = hit.footprint.expected_count(ctx.material);
    smooth * const_p_modulation(&vertices, p, expected, &RandomStream::new(seed))
}
