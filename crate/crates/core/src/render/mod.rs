//! Analytic-scene renderer: smooth split-sum IBL, glint IBL, the
//! constant-probability baseline and the explicit-microfacet reference.

mod image;
mod reference;
mod scene;
mod shade;

use std::sync::OnceLock;

use rayon::prelude::*;

pub use self::image::{srgb_byte, tonemap_write, ImageBuffer};
pub use reference::{unprojected_mass, ReferenceShader, UnprojectedGgx, DESK_SCALE_CAP, EXPECTATION_SAMPLES};
pub use scene::{Camera, Geometry, Scene, SurfaceHit};
pub use shade::{
    const_p_modulation, const_p_probability, reflection_probs, reflection_probs_from_weights, shade_const_p, shade_glint,
    shade_smooth, ShadingContext,
};

use crate::brdf::AlbedoTables;
use crate::counting::RandomStream;
use crate::envmap::{compute_levels, prefilter, EnvironmentMap, PrefilterOptions, PrefilteredEnv};
use crate::error::{Error, Result};
use crate::grid::{aggregate_modulation, grid_vertices, GridVertexDraw};
use crate::math::Rgb;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShadeMode {
    Smooth,
    Glint,
    ConstP { gamma_deg: f64 },
    Reference,
    /// Glint shading under a constant white environment.
    Furnace,
}

impl ShadeMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Smooth => "smooth",
            Self::Glint => "glint",
            Self::ConstP { .. } => "const_p",
            Self::Reference => "reference",
            Self::Furnace => "furnace",
        }
    }

    pub fn parse(name: &str, gamma_deg: f64) -> std::result::Result<Self, String> {
        match name.to_ascii_lowercase().as_str() {
            "smooth" => Ok(Self::Smooth),
            "glint" | "glint_ours" | "ours" => Ok(Self::Glint),
            "const_p" | "glint_const_p" | "constp" => {
                if !(gamma_deg > 0.0 && gamma_deg <= 90.0) {
                    return Err("gamma must lie in (0, 90] degrees".into());
                }
                Ok(Self::ConstP { gamma_deg })
            }
            "reference" | "ref" => Ok(Self::Reference),
            "furnace" => Ok(Self::Furnace),
            _ => Err(format!("unknown mode `{name}`")),
        }
    }
}

/// Seed of realization `index` under a global seed.
pub fn realization_seed(global: u64, index: u64) -> u64 {
    RandomStream::new(global).hash(&[0x5eed, index])
}

/// Constant white environment with its (trivial) prefiltered form.
pub fn white_furnace(k: usize) -> Result<(EnvironmentMap, PrefilteredEnv)> {
    let env = EnvironmentMap::constant(16, Rgb::WHITE);
    let levels = compute_levels(&env, k, 1e-3, Default::default())?;
    let options = PrefilterOptions {
        base_height: 16,
        samples_per_texel: 1,
        ..Default::default()
    };
    let penv = prefilter(&env, &levels, options)?;
    Ok((env, penv))
}

type Modulator<'a> = Box<dyn Fn(usize, &SurfacePlan, u64) -> f64 + Sync + 'a>;

struct SurfacePlan {
    hit: SurfaceHit,
    smooth: Rgb,
    probs: Vec<f64>,
    vertices: [GridVertexDraw; 6],
    expected_count: f64,
}

enum PixelPlan {
    Background(Rgb),
    Surface(Box<SurfacePlan>),
}

/// Per-pixel shading plan shared by every realization of a scene.
pub struct Renderer<'a> {
    scene: Scene,
    env: &'a EnvironmentMap,
    penv: &'a PrefilteredEnv,
    pixels: Vec<PixelPlan>,
    reference: OnceLock<(ReferenceShader<'a>, Vec<f64>)>,
}

impl<'a> Renderer<'a> {
    pub fn new(scene: Scene, env: &'a EnvironmentMap, penv: &'a PrefilteredEnv, tables: &AlbedoTables) -> Result<Self> {
        scene.validate()?;
        let (w, h) = (scene.camera.width, scene.camera.height);
        let ctx = ShadingContext {
            material: &scene.material,
            penv,
            tables,
            env_rotation: scene.env_rotation_deg.to_radians(),
        };
        let pixels = (0..w * h)
            .into_par_iter()
            .map(|i| {
                let (x, y) = (i % w, i / w);
                match scene.trace(x, y) {
                    None => {
                        let d = scene.camera.ray_direction(x as f64 + 0.5, y as f64 + 0.5);
                        PixelPlan::Background(env.lookup(scene.env_direction(d)))
                    }
                    Some(hit) => {
                        let mut weights = vec![0.0; penv.k()];
                        let smooth = shade_smooth(&hit, &ctx, &mut weights);
                        let mut probs = Vec::with_capacity(weights.len() + 1);
                        reflection_probs_from_weights(hit.cos_o(), scene.material.alpha, tables, &weights, &mut probs);
                        PixelPlan::Surface(Box::new(SurfacePlan {
                            hit,
                            smooth,
                            probs,
                            vertices: grid_vertices(&hit.footprint, &scene.material),
                            expected_count: hit.footprint.expected_count(&scene.material),
                        }))
                    }
                }
            })
            .collect();
        Ok(Self {
            scene,
            env,
            penv,
            pixels,
            reference: OnceLock::new(),
        })
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn width(&self) -> usize {
        self.scene.camera.width
    }

    pub fn height(&self) -> usize {
        self.scene.camera.height
    }

    pub fn hit_mask(&self) -> Vec<bool> {
        self.pixels.iter().map(|p| matches!(p, PixelPlan::Surface(_))).collect()
    }

    /// Largest per-pixel expected microfacet count.
    pub fn max_expected_count(&self) -> f64 {
        self.pixels
            .iter()
            .filter_map(|p| match p {
                PixelPlan::Surface(s) => Some(s.expected_count),
                PixelPlan::Background(_) => None,
            })
            .fold(0.0, f64::max)
    }

    pub fn smooth(&self) -> ImageBuffer {
        self.image(|p| match p {
            PixelPlan::Background(c) => *c,
            PixelPlan::Surface(s) => s.smooth,
        })
    }

    fn image(&self, f: impl Fn(&PixelPlan) -> Rgb + Sync) -> ImageBuffer {
        let data: Vec<f32> = self.pixels.par_iter().flat_map_iter(|p| f(p).to_f32()).collect();
        ImageBuffer {
            width: self.width(),
            height: self.height(),
            data,
        }
    }

    fn reference_state(&self) -> Result<&(ReferenceShader<'a>, Vec<f64>)> {
        ReferenceShader::check_cap(self.max_expected_count())?;
        Ok(self.reference.get_or_init(|| {
            let shader = ReferenceShader::new(self.env, self.scene.env_rotation_deg.to_radians(), self.scene.material.alpha);
            let expectations = self
                .pixels
                .par_iter()
                .map(|p| match p {
                    PixelPlan::Surface(s) => shader.expected_reflection(s.hit.normal, s.hit.wo),
                    PixelPlan::Background(_) => 0.0,
                })
                .collect();
            (shader, expectations)
        }))
    }

    /// Per-surface-pixel modulation closure for `mode` (1 for smooth).
    fn modulator(&self, mode: ShadeMode) -> Result<Modulator<'_>> {
        let levels = self.penv.levels().values();
        Ok(match mode {
            ShadeMode::Smooth => Box::new(|_, _, _| 1.0),
            ShadeMode::Glint | ShadeMode::Furnace => Box::new(move |_, s, seed| {
                aggregate_modulation(&s.vertices, levels, &s.probs, s.expected_count, &RandomStream::new(seed))
            }),
            ShadeMode::ConstP { gamma_deg } => {
                let p = const_p_probability(gamma_deg, self.scene.material.alpha);
                Box::new(move |_, s, seed| const_p_modulation(&s.vertices, p, s.expected_count, &RandomStream::new(seed)))
            }
            ShadeMode::Reference => {
                let (shader, expectations) = self.reference_state()?;
                Box::new(move |i, s, seed| {
                    shader.modulation(s.hit.normal, s.hit.wo, &s.vertices, s.expected_count, expectations[i], seed)
                })
            }
        })
    }

    /// One realization with the given realization seed.
    pub fn realization(&self, mode: ShadeMode, seed: u64) -> Result<ImageBuffer> {
        self.mean_of(mode, &[seed])
    }

    /// Pixelwise mean over realizations `0..count` of `global_seed`.
    pub fn mean(&self, mode: ShadeMode, global_seed: u64, count: u64) -> Result<ImageBuffer> {
        let seeds: Vec<u64> = (0..count).map(|r| realization_seed(global_seed, r)).collect();
        self.mean_of(mode, &seeds)
    }

    pub fn mean_of(&self, mode: ShadeMode, seeds: &[u64]) -> Result<ImageBuffer> {
        if seeds.is_empty() {
            return Err(Error::MissingInput("realization seeds"));
        }
        let modulate = self.modulator(mode)?;
        let data: Vec<f32> = self
            .pixels
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, p)| {
                let c = match p {
                    PixelPlan::Background(c) => *c,
                    PixelPlan::Surface(s) => {
                        let m: f64 = seeds.iter().map(|&seed| modulate(i, s, seed)).sum::<f64>() / seeds.len() as f64;
                        s.smooth * m
                    }
                };
                c.to_f32()
            })
            .collect();
        Ok(ImageBuffer {
            width: self.width(),
            height: self.height(),
            data,
        })
    }
}

/// Render one realization of `mode`; furnace mode substitutes a white
/// environment for `env`/`penv`.
pub fn render(
    scene: &Scene,
    mode: ShadeMode,
    env: &EnvironmentMap,
    penv: &PrefilteredEnv,
    tables: &AlbedoTables,
    seed: u64,
) -> Result<ImageBuffer> {
    if mode == ShadeMode::Furnace {
        let (white, white_p) = white_furnace(penv.k())?;
        return Renderer::new(*scene, &white, &white_p, tables)?.realization(mode, realization_seed(seed, 0));
    }
    Renderer::new(*scene, env, penv, tables)?.realization(mode, realization_seed(seed, 0))
}
