//! Render configuration: INI sections `scene`, `material`, `envmap`, `mode`,
//! `seed` and `output`. Every key can be overridden by an environment variable
//! `GLINT_IBL_<SECTION>_<KEY>` and by a command-line flag `--<section>-<key>`,
//! in that order of increasing precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ini::Ini;

use crate::brdf::SurfaceMaterial;
use crate::envmap::WeightSpace;
use crate::error::{Error, Result};
use crate::math::{Rgb, Vec3};
use crate::render::{Camera, Geometry, Scene, ShadeMode};

pub const ENV_PREFIX: &str = "GLINT_IBL_";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfigKey {
    pub section: &'static str,
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

impl ConfigKey {
    /// `section.key`.
    pub fn name(&self) -> String {
        format!("{}.{}", self.section, self.key)
    }

    /// Command-line flag without dashes, e.g. `scene-uv-scale`.
    pub fn flag(&self) -> String {
        format!("{}-{}", self.section, self.key).replace('_', "-")
    }

    pub fn env_var(&self) -> String {
        format!("{ENV_PREFIX}{}_{}", self.section, self.key).to_ascii_uppercase()
    }
}

const fn key(section: &'static str, key: &'static str, default: &'static str, help: &'static str) -> ConfigKey {
    ConfigKey {
        section,
        key,
        default,
        help,
    }
}

pub const KEYS: &[ConfigKey] = &[
    key("scene", "geometry", "sphere", "sphere or plane"),
    key("scene", "width", "256", "image width in pixels"),
    key("scene", "height", "256", "image height in pixels"),
    key("scene", "fov", "45", "vertical field of view, degrees"),
    key("scene", "camera_distance", "3.2", "camera distance from the origin"),
    key("scene", "env_rotation", "0", "azimuthal environment rotation, degrees"),
    key("scene", "uv_scale", "0.5", "uv units per surface parameter range"),
    key("material", "sqrt_alpha", "0.4", "perceptual roughness"),
    key("material", "f0", "1,1,1", "normal-incidence reflectance, one value or r,g,b"),
    key("material", "log_n0", "14", "natural log of microfacets per unit patch"),
    key("material", "density_scale", "1", "linear density multiplier; accepts e^x"),
    key("envmap", "path", "builtin:three_region", "file (.hdr/.pfm) or builtin:white|three_region"),
    key("envmap", "levels", "8", "number of radiance levels K"),
    key("envmap", "clip_floor", "0.001", "lower luminance clip of the level ladder"),
    key("envmap", "space", "linear", "fuzzy weight space: linear or log"),
    key("envmap", "cache", "", "prefiltered cache path (read if present, else written)"),
    key("envmap", "quantize", "false", "store weights as 16-bit normalized values"),
    key("envmap", "base_height", "128", "height of the sharpest prefiltered mip"),
    key("envmap", "samples", "1024", "GGX samples per prefiltered texel"),
    key("mode", "type", "glint", "smooth, glint, const_p, reference or furnace"),
    key("mode", "gamma", "20", "cone half-angle for const_p, degrees"),
    key("mode", "realizations", "1", "realizations averaged per pixel"),
    key("seed", "value", "0", "global seed"),
    key("output", "path", "render", "output path without extension"),
    key("output", "exposure", "0", "PNG exposure in stops"),
    key("output", "formats", "png,pfm", "comma-separated output formats"),
    key("output", "tables", "", "albedo table cache path"),
];

pub fn lookup_key(name: &str) -> Option<&'static ConfigKey> {
    KEYS.iter().find(|k| k.name() == name)
}

/// Where the environment comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvSource {
    White,
    ThreeRegion,
    File(PathBuf),
}

/// Fully resolved render settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderConfig {
    pub scene: Scene,
    pub env: EnvSource,
    pub levels: usize,
    pub clip_floor: f64,
    pub space: WeightSpace,
    pub cache: Option<PathBuf>,
    pub quantize: bool,
    pub base_height: usize,
    pub samples: u32,
    pub mode: ShadeMode,
    pub realizations: u64,
    pub seed: u64,
    pub output: PathBuf,
    pub exposure: f64,
    pub formats: Vec<String>,
    pub tables: Option<PathBuf>,
}

/// Raw `section.key → value` strings, layered from defaults upwards.
#[derive(Debug, Clone, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            values: KEYS.iter().map(|k| (k.name(), k.default.to_string())).collect(),
        }
    }
}

impl RawConfig {
    pub fn set(&mut self, name: &str, value: impl Into<String>) -> Result<()> {
        if lookup_key(name).is_none() {
            return Err(Error::config(name, "unknown key"));
        }
        self.values.insert(name.to_string(), value.into());
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(String::as_str)
    }

    pub fn merge_ini_str(&mut self, text: &str) -> Result<()> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::config("<file>", e.to_string()))?;
        for (section, props) in ini.iter() {
            for (k, v) in props.iter() {
                let name = match section {
                    Some(s) => format!("{s}.{k}"),
                    None => k.to_string(),
                };
                self.set(&name, v.trim())?;
            }
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.merge_ini_str(&text)
    }

    /// Apply `GLINT_IBL_<SECTION>_<KEY>` overrides from `vars`.
    pub fn merge_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) {
        let vars: BTreeMap<String, String> = vars.into_iter().collect();
        for k in KEYS {
            if let Some(v) = vars.get(&k.env_var()) {
                self.values.insert(k.name(), v.clone());
            }
        }
    }

    /// Resolved configuration as INI text.
    pub fn to_ini_string(&self) -> String {
        let mut out = String::new();
        let mut current = "";
        for k in KEYS {
            if k.section != current {
                if !current.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{}]\n", k.section));
                current = k.section;
            }
            out.push_str(&format!("{} = {}\n", k.key, self.values[&k.name()]));
        }
        out
    }

    fn str(&self, name: &str) -> &str {
        self.values.get(name).map(String::as_str).unwrap_or_default()
    }

    fn parse<T: std::str::FromStr>(&self, name: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.str(name)
            .parse()
            .map_err(|e: T::Err| Error::config(name, format!("`{}`: {e}", self.str(name))))
    }

    fn number(&self, name: &str) -> Result<f64> {
        let s = self.str(name);
        let parsed = match s.strip_prefix("e^") {
            Some(exp) => exp.trim().parse::<f64>().map(f64::exp),
            None => s.parse::<f64>(),
        };
        match parsed {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::config(name, format!("`{s}` is not a finite number"))),
        }
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        let s = self.str(name);
        (!s.is_empty()).then(|| PathBuf::from(s))
    }

    fn color(&self, name: &str) -> Result<Rgb> {
        let parts: Vec<&str> = self.str(name).split(',').map(str::trim).collect();
        let vals: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::config(name, e.to_string()))?;
        match vals[..] {
            [v] => Ok(Rgb::splat(v)),
            [r, g, b] => Ok(Rgb::new(r, g, b)),
            _ => Err(Error::config(name, "expected one value or r,g,b")),
        }
    }

    pub fn resolve(&self) -> Result<RenderConfig> {
        let geometry: Geometry = self.parse("scene.geometry")?;
        let width: usize = self.parse("scene.width")?;
        let height: usize = self.parse("scene.height")?;
        let distance = self.number("scene.camera_distance")?;
        let position = match geometry {
            Geometry::Sphere => Vec3::new(0.0, 0.0, distance),
            Geometry::Plane => Vec3::new(0.0, 0.6 * distance, distance),
        };
        if !(distance > 1.0) && geometry == Geometry::Sphere {
            return Err(Error::config("scene.camera_distance", "camera must be outside the unit sphere"));
        }
        let material = SurfaceMaterial::from_sqrt_alpha(
            self.number("material.sqrt_alpha")?,
            self.color("material.f0")?,
            self.number("material.log_n0")?,
            self.number("material.density_scale")?,
        )?;
        let scene = Scene {
            geometry,
            camera: Camera {
                position,
                look_at: Vec3::new(0.0, 0.0, 0.0),
                vfov_deg: self.number("scene.fov")?,
                width,
                height,
            },
            env_rotation_deg: self.number("scene.env_rotation")?,
            material,
            uv_scale: self.number("scene.uv_scale")?,
        };
        scene.validate()?;
        let env = match self.str("envmap.path") {
            "builtin:white" => EnvSource::White,
            "builtin:three_region" => EnvSource::ThreeRegion,
            "" => return Err(Error::config("envmap.path", "must not be empty")),
            s if s.starts_with("builtin:") => return Err(Error::config("envmap.path", format!("unknown builtin `{s}`"))),
            s => EnvSource::File(PathBuf::from(s)),
        };
        let levels: usize = self.parse("envmap.levels")?;
        if levels < 2 {
            return Err(Error::config("envmap.levels", "need at least 2 levels"));
        }
        let mode = ShadeMode::parse(self.str("mode.type"), self.number("mode.gamma")?)
            .map_err(|m| Error::config("mode.type", m))?;
        let realizations: u64 = self.parse("mode.realizations")?;
        if realizations == 0 {
            return Err(Error::config("mode.realizations", "must be at least 1"));
        }
        let formats: Vec<String> = self
            .str("output.formats")
            .split(',')
            .map(|f| f.trim().to_ascii_lowercase())
            .filter(|f| !f.is_empty())
            .collect();
        if let Some(bad) = formats.iter().find(|f| *f != "png" && *f != "pfm") {
            return Err(Error::config("output.formats", format!("unsupported format `{bad}`")));
        }
        Ok(RenderConfig {
            scene,
            env,
            levels,
            clip_floor: self.number("envmap.clip_floor")?,
            space: self.parse("envmap.space")?,
            cache: self.path("envmap.cache"),
            quantize: self.parse("envmap.quantize")?,
            base_height: self.parse("envmap.base_height")?,
            samples: self.parse("envmap.samples")?,
            mode,
            realizations,
            seed: self.parse("seed.value")?,
            output: PathBuf::from(self.str("output.path")),
            exposure: self.number("output.exposure")?,
            formats,
            tables: self.path("output.tables"),
        })
    }
}
