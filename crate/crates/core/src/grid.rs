//! Two-LOD triangle-lattice grid that spreads a footprint's microfacet count
//! over seeded vertices and aggregates their multinomial draws.

use crate::brdf::SurfaceMaterial;
use crate::counting::{mix64, sample_multinomial, RandomStream};
use crate::math::smoothstep;

pub const MIN_FOOTPRINT_AREA: f64 = 1e-12;
const LATTICE_WRAP: i64 = 1 << 20;
const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Elliptical pixel footprint in uv units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub center_uv: [f64; 2],
    pub major_len: f64,
    pub minor_len: f64,
    /// Angle of the major axis from +u, radians.
    pub orientation: f64,
    pub area: f64,
}

impl Footprint {
    /// Footprint from screen-space uv derivatives via the singular values of
    /// the Jacobian `[duv_dx duv_dy]`.
    pub fn from_derivatives(center_uv: [f64; 2], duv_dx: [f64; 2], duv_dy: [f64; 2]) -> Self {
        // J Jᵀ, whose eigenvectors are the uv-space axes
        let a = duv_dx[0] * duv_dx[0] + duv_dy[0] * duv_dy[0];
        let b = duv_dx[0] * duv_dx[1] + duv_dy[0] * duv_dy[1];
        let c = duv_dx[1] * duv_dx[1] + duv_dy[1] * duv_dy[1];
        let mean = 0.5 * (a + c);
        let root = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let major = (mean + root).max(0.0).sqrt();
        let minor = (mean - root).max(0.0).sqrt();
        let orientation = 0.5 * (2.0 * b).atan2(a - c);
        let finite = major.is_finite() && minor.is_finite();
        if !finite || major * major * std::f64::consts::FRAC_PI_4 < MIN_FOOTPRINT_AREA {
            let r = (MIN_FOOTPRINT_AREA / std::f64::consts::FRAC_PI_4).sqrt();
            return Self {
                center_uv,
                major_len: r,
                minor_len: r,
                orientation: 0.0,
                area: MIN_FOOTPRINT_AREA,
            };
        }
        let minor = minor.max(MIN_FOOTPRINT_AREA / (std::f64::consts::FRAC_PI_4 * major));
        let area = (std::f64::consts::FRAC_PI_4 * major * minor).clamp(MIN_FOOTPRINT_AREA, 1.0);
        Self {
            center_uv,
            major_len: major,
            minor_len: minor,
            orientation,
            area,
        }
    }

    pub fn anisotropy(&self) -> f64 {
        self.major_len / self.minor_len
    }

    /// `E[N_P] = ρ_N · N₀ · |P|`.
    pub fn expected_count(&self, material: &SurfaceMaterial) -> f64 {
        material.microfacets_per_patch() * self.area
    }
}

/// One weighted, seeded grid vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridVertexDraw {
    pub weight: f64,
    pub seed: u64,
    pub count: f64,
}

/// Six vertices (three per bracketing LOD) with weights summing to one.
pub fn grid_vertices(fp: &Footprint, material: &SurfaceMaterial) -> [GridVertexDraw; 6] {
    let count = fp.expected_count(material);
    let lod_f = fp.major_len.log2();
    let lod0 = lod_f.floor();
    let blend = smoothstep(lod_f - lod0);
    let mut out = [GridVertexDraw {
        weight: 0.0,
        seed: 0,
        count,
    }; 6];
    for (slot, (lod, lod_weight)) in [(lod0 as i64, 1.0 - blend), (lod0 as i64 + 1, blend)].into_iter().enumerate() {
        for (i, (x, y, bary)) in triangle_corners(fp.center_uv, lod).into_iter().enumerate() {
            out[3 * slot + i] = GridVertexDraw {
                weight: bary * lod_weight,
                seed: vertex_seed(x, y, lod),
                count,
            };
        }
    }
    out
}

/// Lattice corners and barycentric weights of the triangle containing `uv`
/// on the lattice with spacing `2^lod`.
fn triangle_corners(uv: [f64; 2], lod: i64) -> [(i64, i64, f64); 3] {
    let s = (lod as f64).exp2();
    let b = uv[1] / (s * SQRT3_2);
    let a = uv[0] / s - 0.5 * b;
    let (i, j) = (a.floor(), b.floor());
    let (fa, fb) = (a - i, b - j);
    let (i, j) = (i as i64, j as i64);
    if fa + fb < 1.0 {
        [(i, j, 1.0 - fa - fb), (i + 1, j, fa), (i, j + 1, fb)]
    } else {
        [(i + 1, j + 1, fa + fb - 1.0), (i, j + 1, 1.0 - fa), (i + 1, j, 1.0 - fb)]
    }
}

fn vertex_seed(x: i64, y: i64, lod: i64) -> u64 {
    let wx = x.rem_euclid(LATTICE_WRAP) as u64;
    let wy = y.rem_euclid(LATTICE_WRAP) as u64;
    mix64(mix64(wx ^ (wy << 20) ^ ((lod as u64) << 40)) ^ 0x6a09_e667_f3bc_c908)
}

/// `Σ_i w_i Σ_k L_k M_k^(i) / (E_NP Σ_k L_k p_k)`; zero when the expected
/// reflected radiance vanishes.
///
/// `probs` holds `p_1..p_K` followed by the dummy bin; `level_radiance` has
/// length K.
pub fn aggregate_modulation(
    vertices: &[GridVertexDraw],
    level_radiance: &[f64],
    probs: &[f64],
    expected_count: f64,
    stream: &RandomStream,
) -> f64 {
    let expected: f64 = level_radiance.iter().zip(probs).map(|(l, p)| l * p).sum();
    let denom = expected_count * expected;
    if !(denom > 0.0) {
        return 0.0;
    }
    let mut numer = 0.0;
    for v in vertices.iter().filter(|v| v.weight > 0.0) {
        let m = sample_multinomial(v.count, probs, stream, v.seed);
        let reflected: f64 = level_radiance.iter().zip(&m.counts).map(|(l, c)| l * c).sum();
        numer += v.weight * reflected;
    }
    numer / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Rgb;
    use proptest::prelude::*;

    fn material(log_n0: f64) -> SurfaceMaterial {
        SurfaceMaterial {
            alpha: 0.16,
            f0: Rgb::splat(0.9),
            log_n0,
            density_scale: 1.0,
        }
    }

    #[test]
    fn isotropic_and_anisotropic_footprints() {
        let s = 0.01;
        let fp = Footprint::from_derivatives([0.0, 0.0], [s, 0.0], [0.0, s]);
        assert!((fp.major_len - s).abs() < 1e-15 && (fp.minor_len - s).abs() < 1e-15);
        assert!((fp.area - std::f64::consts::FRAC_PI_4 * s * s).abs() < 1e-18);
        let fp = Footprint::from_derivatives([0.0, 0.0], [2.0 * s, 0.0], [0.0, s]);
        assert!((fp.anisotropy() - 2.0).abs() < 1e-12);
        assert!(fp.orientation.abs() < 1e-12);
        let fp = Footprint::from_derivatives([0.0, 0.0], [0.0, 0.0], [0.0, 0.0]);
        assert_eq!(fp.area, MIN_FOOTPRINT_AREA);
        let fp = Footprint::from_derivatives([0.0, 0.0], [10.0, 0.0], [0.0, 10.0]);
        assert_eq!(fp.area, 1.0);
    }

    #[test]
    fn singular_values_match_eigen_oracle() {
        let rs = RandomStream::new(8);
        for i in 0..1000u64 {
            let r = |k| rs.uniform(&[i, k]) * 2.0 - 1.0;
            let (dx, dy) = ([r(0), r(1)], [r(2), r(3)]);
            let fp = Footprint::from_derivatives([0.0, 0.0], dx, dy);
            // eigenvalues of JᵀJ by the characteristic polynomial
            let (p, q, s) = (dx[0] * dx[0] + dx[1] * dx[1], dx[0] * dy[0] + dx[1] * dy[1], dy[0] * dy[0] + dy[1] * dy[1]);
            let tr = p + s;
            let det = p * s - q * q;
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            let (l1, l2) = (tr / 2.0 + disc, (tr / 2.0 - disc).max(0.0));
            assert!((fp.major_len - l1.sqrt()).abs() < 1e-6);
            if l2.sqrt() > 1e-6 {
                assert!((fp.minor_len - l2.sqrt()).abs() < 1e-6);
            }
            assert!(fp.major_len >= fp.minor_len && fp.minor_len > 0.0);
        }
    }

    #[test]
    fn lattice_vertex_gets_full_weight() {
        // major = 1 gives LOD 0 with blend 0; uv (2, 0) is a lattice vertex
        let fp = Footprint::from_derivatives([2.0, 0.0], [1.0, 0.0], [0.0, 1.0]);
        let v = grid_vertices(&fp, &material(3.0));
        let max = v.iter().map(|x| x.weight).fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-12);
        assert!(v.iter().all(|x| x.count == fp.expected_count(&material(3.0))));
    }

    #[test]
    fn deterministic_seeds() {
        let fp = Footprint::from_derivatives([0.3, 0.7], [0.01, 0.0], [0.0, 0.01]);
        assert_eq!(grid_vertices(&fp, &material(5.0)), grid_vertices(&fp, &material(5.0)));
        let other = Footprint::from_derivatives([5.3, 0.7], [0.01, 0.0], [0.0, 0.01]);
        assert_ne!(grid_vertices(&fp, &material(5.0))[0].seed, grid_vertices(&other, &material(5.0))[0].seed);
    }

    #[test]
    fn modulation_edge_cases() {
        let fp = Footprint::from_derivatives([0.3, 0.2], [0.05, 0.0], [0.0, 0.05]);
        let v = grid_vertices(&fp, &material(8.0));
        let s = RandomStream::new(1);
        assert_eq!(aggregate_modulation(&v, &[0.0, 1.0], &[0.0, 0.0, 1.0], 3.0, &s), 0.0);
        // single lit level with certain reflection and integral counts
        let verts: Vec<_> = v.iter().map(|x| GridVertexDraw { count: 4.0, ..*x }).collect();
        let m = aggregate_modulation(&verts, &[0.0, 2.5], &[0.0, 1.0, 0.0], 4.0, &s);
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn modulation_is_unbiased() {
        let fp = Footprint::from_derivatives([0.3, 0.2], [0.05, 0.0], [0.0, 0.05]);
        let mut v = grid_vertices(&fp, &material(0.0));
        v.iter_mut().for_each(|x| x.count = 100.0);
        let seeds = 10_000u64;
        let (mut sum, mut sq) = (0.0, 0.0);
        for seed in 0..seeds {
            let m = aggregate_modulation(&v, &[1.0, 2.0], &[0.2, 0.3, 0.5], 100.0, &RandomStream::new(seed));
            sum += m;
            sq += m * m;
        }
        let mean = sum / seeds as f64;
        let se = ((sq / seeds as f64 - mean * mean) / seeds as f64).sqrt();
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
        assert!((mean - 1.0).abs() < 3.0 * se + 1e-3, "{mean} ± {se}");
    }

    #[test]
    fn continuity_across_triangle_edges() {
        let mat = material(6.0);
        let s = RandomStream::new(4);
        let levels = [0.0, 1.0, 3.0];
        let probs = [0.1, 0.2, 0.05, 0.65];
        let mut prev: Option<f64> = None;
        let mut max_jump: f64 = 0.0;
        for step in 0..10_000 {
            let u = 0.37 + step as f64 * 1e-5;
            let fp = Footprint::from_derivatives([u, 0.211], [0.4, 0.0], [0.0, 0.4]);
            let v = grid_vertices(&fp, &mat);
            let m = aggregate_modulation(&v, &levels, &probs, fp.expected_count(&mat), &s);
            if let Some(p) = prev {
                max_jump = max_jump.max((m - p).abs());
            }
            prev = Some(m);
        }
        assert!(max_jump < 1e-3, "{max_jump}");

        // straddle the edge a + b = 1 of the spacing-1/4 lattice
        let b = 0.211 / (0.25 * SQRT3_2);
        let u_edge = 0.25 * ((1.0 - b) + 0.5 * b) + 0.25;
        let at = |u: f64| {
            let fp = Footprint::from_derivatives([u, 0.211], [0.4, 0.0], [0.0, 0.4]);
            aggregate_modulation(&grid_vertices(&fp, &mat), &levels, &probs, fp.expected_count(&mat), &s)
        };
        assert!((at(u_edge - 5e-6) - at(u_edge + 5e-6)).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn weights_partition_unity(u in -50.0f64..50.0, v in -50.0f64..50.0, a in 1e-4f64..2.0, b in 1e-4f64..2.0, c in -1.0f64..1.0) {
            let fp = Footprint::from_derivatives([u, v], [a, c * a], [-c * b, b]);
            let w: f64 = grid_vertices(&fp, &material(4.0)).iter().map(|x| x.weight).sum();
            prop_assert!((w - 1.0).abs() < 1e-6);
            prop_assert!(fp.area > 0.0 && fp.area <= 1.0);
        }
    }
}
