use std::path::Path;

use crate::brdf::{AlbedoTables, SurfaceMaterial};
use crate::envmap::{compute_levels, prefilter, EnvironmentMap, PrefilterOptions, PrefilteredEnv, WeightSpace};
use crate::error::{Error, Result};
use crate::math::Rgb;
use crate::render::{realization_seed, tonemap_write, white_furnace, Camera, Geometry, Renderer, Scene, ShadeMode};

use super::compare::{glint_fraction, glint_mask, jaccard_distance, masked_relative_error};
use super::report::{Bound, ReportLine, ValidationReport};

/// Luminance below which foreground pixels are left out of relative errors.
pub const LUMINANCE_FLOOR: f64 = 0.01;
pub const DEFAULT_UV_SCALE: f64 = 0.5;

/// A camera-facing unit sphere with a white-Fresnel glint material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSetup {
    pub resolution: usize,
    pub sqrt_alpha: f64,
    pub log_n0: f64,
    /// `ln ρ_N`.
    pub log_density: f64,
    pub uv_scale: f64,
    pub f0: Rgb,
}

impl Default for SphereSetup {
    fn default() -> Self {
        Self {
            resolution: 128,
            sqrt_alpha: 0.4,
            log_n0: 14.0,
            log_density: 0.0,
            uv_scale: DEFAULT_UV_SCALE,
            f0: Rgb::WHITE,
        }
    }
}

impl SphereSetup {
    pub fn scene(&self) -> Result<Scene> {
        let material = SurfaceMaterial::from_sqrt_alpha(self.sqrt_alpha, self.f0, self.log_n0, self.log_density.exp())?;
        let scene = Scene {
            geometry: Geometry::Sphere,
            camera: Camera::looking_at_sphere(self.resolution),
            env_rotation_deg: 0.0,
            material,
            uv_scale: self.uv_scale,
        };
        scene.validate()?;
        Ok(scene)
    }
}

/// Foreground pixels whose smooth luminance exceeds the floor.
fn foreground(renderer: &Renderer, smooth: &[f64]) -> Vec<bool> {
    renderer
        .hit_mask()
        .iter()
        .zip(smooth)
        .map(|(h, s)| *h && *s > LUMINANCE_FLOOR)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FurnaceOptions {
    pub setup: SphereSetup,
    pub log_densities: Vec<f64>,
    pub realizations: u64,
    pub seed: u64,
    pub levels: usize,
}

impl Default for FurnaceOptions {
    fn default() -> Self {
        Self {
            setup: SphereSetup::default(),
            log_densities: vec![-2.0, 0.0, 2.0],
            realizations: 1024,
            seed: 0,
            levels: 4,
        }
    }
}

pub const MIN_FURNACE_REALIZATIONS: u64 = 256;

/// White-furnace validation: the smooth render reproduces the albedo table,
/// glint means converge to it, and sparse densities produce bright glints.
pub fn furnace_report(opts: &FurnaceOptions, tables: &AlbedoTables, out_dir: Option<&Path>) -> Result<ValidationReport> {
    if opts.realizations < MIN_FURNACE_REALIZATIONS {
        return Err(Error::config(
            "furnace.realizations",
            format!("must be at least {MIN_FURNACE_REALIZATIONS}"),
        ));
    }
    if opts.log_densities.is_empty() {
        return Err(Error::config("furnace.densities", "needs at least one density"));
    }
    let (env, penv) = white_furnace(opts.levels)?;
    let mut r = ValidationReport::new(format!(
        "furnace resolution={} sqrt_alpha={} log_n0={} uv_scale={} realizations={} seed={}",
        opts.setup.resolution, opts.setup.sqrt_alpha, opts.setup.log_n0, opts.setup.uv_scale, opts.realizations, opts.seed
    ));
    let mut fractions = Vec::new();
    for (di, &log_density) in opts.log_densities.iter().enumerate() {
        let setup = SphereSetup { log_density, ..opts.setup };
        let scene = setup.scene()?;
        let renderer = Renderer::new(scene, &env, &penv, tables)?;
        let smooth_img = renderer.smooth();
        let smooth = smooth_img.luminance();
        let fg = foreground(&renderer, &smooth);
        if di == 0 {
            let mut worst = 0.0f64;
            for (i, _) in fg.iter().enumerate().filter(|(_, f)| **f) {
                let w = renderer.width();
                if let Some(hit) = scene.trace(i % w, i / w) {
                    let lut = tables.directional_albedo(scene.material.f0, hit.cos_o(), scene.material.alpha).luminance();
                    worst = worst.max((smooth[i] - lut).abs() / lut);
                }
            }
            r.push(ReportLine::new("furnace_smooth_vs_table", "max_rel_err", worst, Bound::AtMost, 0.01));
            if let Some(dir) = out_dir {
                tonemap_write(&smooth_img, 0.0, &dir.join("furnace_smooth.png"))?;
                smooth_img.write_pfm(&dir.join("furnace_smooth.pfm"))?;
            }
        }
        let mean_img = renderer.mean(ShadeMode::Furnace, opts.seed, opts.realizations)?;
        let stats = masked_relative_error(&mean_img.luminance(), &smooth, &fg, LUMINANCE_FLOOR);
        let tag = format!("{log_density:+}");
        r.push(ReportLine::new(format!("furnace_mean_logrho{tag}"), "mean_rel_err", stats.mean, Bound::Below, 0.03));
        r.note(format!(
            "log density {tag}: max E[N_P] {:.3e}, max per-pixel relative error {:.4}, pixels {}",
            renderer.max_expected_count(),
            stats.max,
            stats.pixels
        ));
        let single = renderer.realization(ShadeMode::Furnace, realization_seed(opts.seed, 0))?;
        let fraction = glint_fraction(&single.luminance(), &smooth, &renderer.hit_mask());
        fractions.push(fraction);
        if log_density <= -2.0 {
            r.push(ReportLine::new(format!("furnace_bright_logrho{tag}"), "fraction", fraction, Bound::Above, 0.01));
        } else {
            r.note(format!("log density {tag}: bright pixel fraction {fraction:.4}"));
        }
        if let Some(dir) = out_dir {
            tonemap_write(&single, 0.0, &dir.join(format!("furnace_single_logrho{tag}.png")))?;
            mean_img.write_pfm(&dir.join(format!("furnace_mean_logrho{tag}.pfm")))?;
        }
    }
    if opts.log_densities.len() > 1 {
        let (lo, hi) = min_max_index(&opts.log_densities);
        r.push(ReportLine::new(
            "furnace_sparsity_tradeoff",
            "fraction_gap",
            fractions[lo] - fractions[hi],
            Bound::Above,
            0.0,
        ));
    }
    Ok(r)
}

fn min_max_index(v: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[lo] {
            lo = i;
        }
        if *x > v[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

/// Synthetic sun/sky/ground environment with its K-level prefiltered form.
pub fn three_region_setup(levels: usize, height: usize) -> Result<(EnvironmentMap, PrefilteredEnv)> {
    let env = EnvironmentMap::three_region(height);
    let lv = compute_levels(&env, levels, 1e-3, WeightSpace::Linear)?;
    let penv = prefilter(&env, &lv, PrefilterOptions::default())?;
    Ok((env, penv))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptions {
    pub setup: SphereSetup,
    pub levels: usize,
    pub realizations: u64,
    pub seed: u64,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self {
            setup: SphereSetup::default(),
            levels: 8,
            realizations: 256,
            seed: 0,
        }
    }
}

/// Glint IBL against the explicit-microfacet reference on a prefiltered
/// environment: realization means and single-realization glint fractions.
pub fn reference_agreement(
    opts: &ReferenceOptions,
    env: &EnvironmentMap,
    penv: &PrefilteredEnv,
    tables: &AlbedoTables,
) -> Result<ValidationReport> {
    let renderer = Renderer::new(opts.setup.scene()?, env, penv, tables)?;
    let smooth = renderer.smooth().luminance();
    let fg = foreground(&renderer, &smooth);
    let glint = renderer.mean(ShadeMode::Glint, opts.seed, opts.realizations)?.luminance();
    let reference = renderer.mean(ShadeMode::Reference, opts.seed ^ 0x5a5a, opts.realizations)?.luminance();
    let (mut sum, mut count) = (0.0, 0usize);
    for i in (0..fg.len()).filter(|&i| fg[i]) {
        sum += (glint[i] - reference[i]).abs() / glint[i].min(reference[i]).max(1e-12);
        count += 1;
    }
    let agreement = sum / count.max(1) as f64;
    let seed = realization_seed(opts.seed, 0);
    let hit = renderer.hit_mask();
    let fg_glint = glint_fraction(&renderer.realization(ShadeMode::Glint, seed)?.luminance(), &smooth, &hit);
    let fg_ref = glint_fraction(&renderer.realization(ShadeMode::Reference, seed)?.luminance(), &smooth, &hit);
    let mut r = ValidationReport::new(format!(
        "reference agreement K={} realizations={} log_density={} seed={}",
        opts.levels, opts.realizations, opts.setup.log_density, opts.seed
    ));
    r.push(ReportLine::new("reference_mean_agreement", "mean_rel_err", agreement, Bound::AtMost, 0.05));
    r.push(ReportLine::new(
        "reference_glint_fraction",
        "rel_diff",
        (fg_glint - fg_ref).abs() / fg_ref,
        Bound::AtMost,
        0.2,
    ));
    r.note(format!("glint fraction: glint {fg_glint:.4}, reference {fg_ref:.4}"));
    r.note(format!(
        "mean vs smooth: glint {:.4}, reference {:.4}",
        masked_relative_error(&glint, &smooth, &fg, LUMINANCE_FLOOR).mean,
        masked_relative_error(&reference, &smooth, &fg, LUMINANCE_FLOOR).mean
    ));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationOptions {
    pub setup: SphereSetup,
    pub gamma_deg: f64,
    pub rotation_deg: f64,
    pub seed: u64,
}

impl Default for RotationOptions {
    fn default() -> Self {
        Self {
            setup: SphereSetup::default(),
            gamma_deg: 20.0,
            rotation_deg: 90.0,
            seed: 0,
        }
    }
}

/// Glint-pixel Jaccard distance between a render and its environment-rotated
/// twin with identical seeds, for the glint model and the constant-probability
/// baseline.
pub fn rotation_sensitivity(
    opts: &RotationOptions,
    env: &EnvironmentMap,
    penv: &PrefilteredEnv,
    tables: &AlbedoTables,
) -> Result<ValidationReport> {
    let base = opts.setup.scene()?;
    let rotated = Scene {
        env_rotation_deg: base.env_rotation_deg + opts.rotation_deg,
        ..base
    };
    let a = Renderer::new(base, env, penv, tables)?;
    let b = Renderer::new(rotated, env, penv, tables)?;
    let seed = realization_seed(opts.seed, 0);
    let mask = a.hit_mask();
    let (sa, sb) = (a.smooth().luminance(), b.smooth().luminance());
    let glints = |r: &Renderer, s: &[f64], mode| -> Result<Vec<bool>> {
        Ok(glint_mask(&r.realization(mode, seed)?.luminance(), s, &mask))
    };
    let ours = jaccard_distance(&glints(&a, &sa, ShadeMode::Glint)?, &glints(&b, &sb, ShadeMode::Glint)?);
    let const_p_mode = ShadeMode::ConstP { gamma_deg: opts.gamma_deg };
    let const_a = glints(&a, &sa, const_p_mode)?;
    let const_b = glints(&b, &sb, const_p_mode)?;
    let baseline = jaccard_distance(&const_a, &const_b);
    let mut r = ValidationReport::new(format!(
        "environment rotation {} deg, gamma {} deg, seed {}",
        opts.rotation_deg, opts.gamma_deg, opts.seed
    ));
    r.push(ReportLine::new("rotation_glint_change", "jaccard", ours, Bound::AtLeast, 0.3));
    r.push(ReportLine::new("rotation_const_p_change", "jaccard", baseline, Bound::AtMost, 0.0));
    r.note(format!(
        "const-p glint pixels {}",
        const_a.iter().filter(|g| **g).count()
    ));
    Ok(r)
}
