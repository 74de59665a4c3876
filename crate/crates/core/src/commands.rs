//! Command implementations shared by the binary and the examples.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::brdf::{AlbedoTables, TableResolution, DEFAULT_TABLE_SAMPLES};
use crate::config::{EnvSource, RenderConfig};
use crate::envmap::{
    compute_levels, load_envmap, prefilter, EnvironmentMap, PrefilterOptions, PrefilteredEnv, RadianceLevels, WeightSpace,
};
use crate::error::{Error, Result};
use crate::math::Rgb;
use crate::render::{tonemap_write, white_furnace, ImageBuffer, Renderer, ShadeMode};

/// Height of the built-in environments.
pub const BUILTIN_ENV_HEIGHT: usize = 256;

pub fn load_environment(source: &EnvSource) -> Result<EnvironmentMap> {
    match source {
        EnvSource::White => Ok(EnvironmentMap::constant(BUILTIN_ENV_HEIGHT, Rgb::WHITE)),
        EnvSource::ThreeRegion => Ok(EnvironmentMap::three_region(BUILTIN_ENV_HEIGHT)),
        EnvSource::File(path) => load_envmap(path),
    }
}

/// Albedo tables from `cache` when valid, otherwise built (and cached).
pub fn load_tables(cache: Option<&Path>) -> Result<AlbedoTables> {
    match cache {
        Some(path) => AlbedoTables::load_or_build(path, TableResolution::default(), DEFAULT_TABLE_SAMPLES),
        None => AlbedoTables::build(TableResolution::default(), DEFAULT_TABLE_SAMPLES),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrefilterRequest {
    pub env: EnvSource,
    pub levels: usize,
    pub clip_floor: f64,
    pub space: WeightSpace,
    pub options: PrefilterOptions,
    pub out: Option<PathBuf>,
}

/// Human-readable level listing, one `L_k` per line.
pub fn describe_levels(levels: &RadianceLevels) -> String {
    let mut s = format!(
        "levels K={} space={} clip_floor={}{}\n",
        levels.k(),
        levels.space(),
        levels.clip_floor(),
        if levels.is_degenerate() { " degenerate" } else { "" }
    );
    for (k, l) in levels.values().iter().enumerate() {
        let _ = writeln!(s, "L{} {l:.9e}", k + 1);
    }
    s
}

pub fn prefilter_command(req: &PrefilterRequest) -> Result<(PrefilteredEnv, String)> {
    let env = load_environment(&req.env)?;
    let levels = compute_levels(&env, req.levels, req.clip_floor, req.space)?;
    let penv = prefilter(&env, &levels, req.options)?;
    if let Some(out) = &req.out {
        penv.save(out)?;
    }
    Ok((penv, describe_levels(&levels)))
}

/// Prefiltered environment for `cfg`, read from or written to its cache.
pub fn prefiltered_for(cfg: &RenderConfig, env: &EnvironmentMap) -> Result<PrefilteredEnv> {
    if let Some(cache) = &cfg.cache {
        if cache.exists() {
            let penv = PrefilteredEnv::load(cache)?;
            if penv.k() != cfg.levels {
                return Err(Error::CacheMismatch("prefiltered level count"));
            }
            return Ok(penv);
        }
    }
    let levels = compute_levels(env, cfg.levels, cfg.clip_floor, cfg.space)?;
    let options = PrefilterOptions {
        base_height: cfg.base_height,
        samples_per_texel: cfg.samples,
        quantize_weights: cfg.quantize,
        ..Default::default()
    };
    let penv = prefilter(env, &levels, options)?;
    if let Some(cache) = &cfg.cache {
        penv.save(cache)?;
    }
    Ok(penv)
}

#[derive(Debug, Clone)]
pub struct RenderOutput {
    pub image: ImageBuffer,
    pub files: Vec<PathBuf>,
    pub max_expected_count: f64,
}

/// Render `cfg` with precomputed tables and write the requested formats.
pub fn render_command(cfg: &RenderConfig, tables: &AlbedoTables) -> Result<RenderOutput> {
    let (env, penv) = if cfg.mode == ShadeMode::Furnace {
        white_furnace(cfg.levels)?
    } else {
        let env = load_environment(&cfg.env)?;
        let penv = prefiltered_for(cfg, &env)?;
        (env, penv)
    };
    let renderer = Renderer::new(cfg.scene, &env, &penv, tables)?;
    let image = if cfg.mode == ShadeMode::Smooth {
        renderer.smooth()
    } else {
        renderer.mean(cfg.mode, cfg.seed, cfg.realizations)?
    };
    if let Some(dir) = cfg.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut files = Vec::new();
    for format in &cfg.formats {
        let path = cfg.output.with_extension(format);
        tonemap_write(&image, cfg.exposure, &path)?;
        files.push(path);
    }
    Ok(RenderOutput {
        image,
        files,
        max_expected_count: renderer.max_expected_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RawConfig;

    #[test]
    fn constant_env_levels_are_degenerate() {
        let req = PrefilterRequest {
            env: EnvSource::White,
            levels: 4,
            clip_floor: 1e-3,
            space: WeightSpace::Linear,
            options: PrefilterOptions {
                base_height: 16,
                samples_per_texel: 4,
                ..Default::default()
            },
            out: None,
        };
        let (penv, text) = prefilter_command(&req).unwrap();
        assert_eq!(penv.levels().values(), &[0.0, 1.0, 1.0, 1.0]);
        assert!(text.contains("degenerate"));
    }

    #[test]
    fn missing_env_file() {
        let e = load_environment(&EnvSource::File("/nonexistent/env.hdr".into())).unwrap_err();
        assert!(e.to_string().contains("file not found"));
    }

    #[test]
    fn cache_level_count_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let mut raw = RawConfig::default();
        raw.set("envmap.cache", dir.path().join("c.gibp").display().to_string()).unwrap();
        raw.set("envmap.levels", "2").unwrap();
        raw.set("envmap.base_height", "16").unwrap();
        raw.set("envmap.samples", "4").unwrap();
        let cfg = raw.resolve().unwrap();
        let env = EnvironmentMap::three_region(32);
        prefiltered_for(&cfg, &env).unwrap();
        raw.set("envmap.levels", "3").unwrap();
        let e = prefiltered_for(&raw.resolve().unwrap(), &env).unwrap_err();
        assert!(matches!(e, Error::CacheMismatch(_)));
    }
}
