//! Split-sum style GGX prefiltering of radiance and fuzzy weight channels.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::levels::{fuzzy_weights_into, RadianceLevels, WeightSpace};
use super::{bilinear_equirect, direction_to_uv, texel_direction, EnvironmentMap};
use crate::brdf::sample_ggx_half;
use crate::counting::RandomStream;
use crate::error::{Error, Result};
use crate::math::{hammersley, Frame, Rgb, Vec3};

pub const DEFAULT_MIP_COUNT: usize = 7;
pub const DEFAULT_SAMPLES_PER_TEXEL: u32 = 1024;
const BASE_HEIGHT: usize = 128;
const MIN_HEIGHT: usize = 16;
const ROTATION_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

const CACHE_MAGIC: &[u8; 4] = b"GIBP";
const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefilterOptions {
    pub mip_count: usize,
    pub samples_per_texel: u32,
    /// Height of mip 0; later mips halve down to 16 rows.
    pub base_height: usize,
    /// Store weights as 16-bit unsigned-normalised values.
    pub quantize_weights: bool,
}

impl Default for PrefilterOptions {
    fn default() -> Self {
        Self {
            mip_count: DEFAULT_MIP_COUNT,
            samples_per_texel: DEFAULT_SAMPLES_PER_TEXEL,
            base_height: BASE_HEIGHT,
            quantize_weights: false,
        }
    }
}

/// One roughness level: interleaved `RGB, w̄_1..w̄_K` per texel.
#[derive(Debug, Clone, PartialEq)]
pub struct MipLevel {
    pub width: usize,
    pub height: usize,
    pub alpha: f64,
    pub data: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrefilteredEnv {
    levels: RadianceLevels,
    mips: Vec<MipLevel>,
    quantized: bool,
}

/// Roughness of mip `m` out of `count` mips: `(m / (count − 1))²`.
pub fn ladder_alpha(m: usize, count: usize) -> f64 {
    let t = m as f64 / (count - 1) as f64;
    t * t
}

/// Filter `env` (radiance) and its weight channels under `levels`.
pub fn prefilter(env: &EnvironmentMap, levels: &RadianceLevels, options: PrefilterOptions) -> Result<PrefilteredEnv> {
    if options.mip_count < 2 {
        return Err(Error::config("envmap.mips", "need at least two mips"));
    }
    if options.samples_per_texel == 0 {
        return Err(Error::config("envmap.samples", "must be positive"));
    }
    let source = SourceChannels::new(env, levels);
    let channels = source.channels;
    let mut mips = Vec::with_capacity(options.mip_count);
    let mut height = options.base_height.max(1);
    for m in 0..options.mip_count {
        let alpha = ladder_alpha(m, options.mip_count);
        let width = 2 * height;
        let data: Vec<f32> = (0..width * height)
            .into_par_iter()
            .flat_map_iter(|i| {
                let (x, y) = (i % width, i / width);
                let d = texel_direction(x, y, width, height);
                let mut out = vec![0.0f64; channels];
                if m == 0 {
                    source.sample(d, &mut out);
                } else {
                    let rot = RandomStream::new(ROTATION_SEED);
                    let offset = (rot.uniform(&[m as u64, x as u64, y as u64, 0]), rot.uniform(&[m as u64, x as u64, y as u64, 1]));
                    source.filter(d, alpha, options.samples_per_texel, offset, &mut out);
                }
                normalise_weights(&mut out[3..]);
                if options.quantize_weights {
                    for w in &mut out[3..] {
                        *w = quantize_unorm16(*w);
                    }
                }
                out.into_iter().map(|v| v as f32)
            })
            .collect();
        mips.push(MipLevel { width, height, alpha, data });
        height = (height / 2).max(MIN_HEIGHT.min(height));
    }
    Ok(PrefilteredEnv {
        levels: levels.clone(),
        mips,
        quantized: options.quantize_weights,
    })
}

/// Brute-force GGX filter of one direction (n = ω_o = ω_r = `dir`); exposed
/// for validation at arbitrary sample counts. Returns radiance and weights.
pub fn filter_direction(env: &EnvironmentMap, levels: &RadianceLevels, dir: Vec3, alpha: f64, samples: u32) -> (Rgb, Vec<f64>) {
    let source = SourceChannels::new(env, levels);
    let mut out = vec![0.0; source.channels];
    source.filter(dir, alpha, samples, (0.0, 0.0), &mut out);
    normalise_weights(&mut out[3..]);
    (Rgb::new(out[0], out[1], out[2]), out[3..].to_vec())
}

fn quantize_unorm16(w: f64) -> f64 {
    (w.clamp(0.0, 1.0) * 65535.0).round() / 65535.0
}

fn normalise_weights(w: &mut [f64]) {
    let sum: f64 = w.iter().sum();
    if sum > 0.0 {
        w.iter_mut().for_each(|x| *x /= sum);
    } else {
        w.fill(0.0);
        w[0] = 1.0;
    }
}

/// Source texels extended with their fuzzy weights.
struct SourceChannels {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl SourceChannels {
    fn new(env: &EnvironmentMap, levels: &RadianceLevels) -> Self {
        let k = levels.k();
        let channels = 3 + k;
        let mut data = Vec::with_capacity(env.width() * env.height() * channels);
        let mut w = vec![0.0; k];
        for c in env.texels().chunks_exact(3) {
            let rgb = Rgb::new(c[0] as f64, c[1] as f64, c[2] as f64);
            fuzzy_weights_into(rgb.luminance(), levels, &mut w);
            data.extend_from_slice(c);
            data.extend(w.iter().map(|x| *x as f32));
        }
        Self {
            width: env.width(),
            height: env.height(),
            channels,
            data,
        }
    }

    fn sample(&self, d: Vec3, out: &mut [f64]) {
        let (u, v) = direction_to_uv(d);
        bilinear_equirect(&self.data, self.width, self.height, self.channels, u, v, out);
    }

    fn filter(&self, d: Vec3, alpha: f64, samples: u32, offset: (f64, f64), out: &mut [f64]) {
        let frame = Frame::from_normal(d);
        let mut tap = vec![0.0; self.channels];
        out.fill(0.0);
        let mut total = 0.0;
        for i in 0..samples {
            let (u1, u2) = hammersley(i, samples);
            let h = frame.to_world(sample_ggx_half((u1 + offset.0).fract(), (u2 + offset.1).fract(), alpha));
            let wi = d.reflect(h);
            let nl = d.dot(wi);
            if nl <= 0.0 {
                continue;
            }
            self.sample(wi, &mut tap);
            for (o, t) in out.iter_mut().zip(&tap) {
                *o += nl * t;
            }
            total += nl;
        }
        if total > 0.0 {
            out.iter_mut().for_each(|o| *o /= total);
        } else {
            self.sample(d, out);
        }
    }
}

impl PrefilteredEnv {
    pub fn levels(&self) -> &RadianceLevels {
        &self.levels
    }

    pub fn k(&self) -> usize {
        self.levels.k()
    }

    pub fn mips(&self) -> &[MipLevel] {
        &self.mips
    }

    pub fn is_quantized(&self) -> bool {
        self.quantized
    }

    /// Trilinear lookup; writes renormalised weights into `weights` (length K)
    /// and returns filtered radiance.
    pub fn sample_into(&self, dir: Vec3, alpha: f64, weights: &mut [f64]) -> Rgb {
        let k = self.k();
        let last = self.mips.len() - 1;
        let f = (last as f64 * alpha.max(0.0).sqrt()).min(last as f64);
        let m0 = (f.floor() as usize).min(last);
        let t = f - m0 as f64;
        let (u, v) = direction_to_uv(dir);
        let mut a = [0.0f64; 3 + 16];
        let mut b = [0.0f64; 3 + 16];
        let lookup = |m: &MipLevel, out: &mut [f64]| bilinear_equirect(&m.data, m.width, m.height, 3 + k, u, v, out);
        lookup(&self.mips[m0], &mut a);
        if t > 0.0 && m0 < last {
            lookup(&self.mips[m0 + 1], &mut b);
            for (x, y) in a.iter_mut().zip(&b).take(3 + k) {
                *x += (y - *x) * t;
            }
        }
        weights[..k].copy_from_slice(&a[3..3 + k]);
        normalise_weights(&mut weights[..k]);
        Rgb::new(a[0], a[1], a[2])
    }

    pub fn sample_prefiltered(&self, dir: Vec3, alpha: f64) -> (Rgb, Vec<f64>) {
        let mut w = vec![0.0; self.k()];
        let c = self.sample_into(dir, alpha, &mut w);
        (c, w)
    }

    /// Serialise to the `GIBP` layout (little-endian).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let u32le = |out: &mut Vec<u8>, v: u32| out.extend_from_slice(&v.to_le_bytes());
        out.extend_from_slice(CACHE_MAGIC);
        u32le(&mut out, CACHE_VERSION);
        u32le(&mut out, self.k() as u32);
        u32le(&mut out, self.mips.len() as u32);
        u32le(&mut out, matches!(self.levels.space(), WeightSpace::Log) as u32);
        u32le(&mut out, self.quantized as u32);
        u32le(&mut out, self.levels.is_degenerate() as u32);
        out.extend_from_slice(&self.levels.clip_floor().to_le_bytes());
        for l in self.levels.values() {
            out.extend_from_slice(&l.to_le_bytes());
        }
        for m in &self.mips {
            u32le(&mut out, m.width as u32);
            u32le(&mut out, m.height as u32);
            out.extend_from_slice(&m.alpha.to_le_bytes());
        }
        for m in &self.mips {
            for v in &m.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = || Error::CacheMismatch("GIBP");
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4).ok_or_else(bad)? != CACHE_MAGIC || r.u32().ok_or_else(bad)? != CACHE_VERSION {
            return Err(bad());
        }
        let k = r.u32().ok_or_else(bad)? as usize;
        let mip_count = r.u32().ok_or_else(bad)? as usize;
        let space = if r.u32().ok_or_else(bad)? == 1 { WeightSpace::Log } else { WeightSpace::Linear };
        let quantized = r.u32().ok_or_else(bad)? == 1;
        let degenerate = r.u32().ok_or_else(bad)? == 1;
        if !(2..=16).contains(&k) || mip_count < 2 {
            return Err(bad());
        }
        let clip = r.f64().ok_or_else(bad)?;
        let values = (0..k).map(|_| r.f64()).collect::<Option<Vec<_>>>().ok_or_else(bad)?;
        let levels = RadianceLevels::from_parts(values, clip, space, degenerate)?;
        let mut dims = Vec::with_capacity(mip_count);
        for _ in 0..mip_count {
            let w = r.u32().ok_or_else(bad)? as usize;
            let h = r.u32().ok_or_else(bad)? as usize;
            let a = r.f64().ok_or_else(bad)?;
            if h == 0 || w != 2 * h {
                return Err(bad());
            }
            dims.push((w, h, a));
        }
        let mut mips = Vec::with_capacity(mip_count);
        for (width, height, alpha) in dims {
            let n = width * height * (3 + k);
            let data = (0..n).map(|_| r.f32()).collect::<Option<Vec<_>>>().ok_or_else(bad)?;
            mips.push(MipLevel { width, height, alpha, data });
        }
        if r.pos != bytes.len() {
            return Err(bad());
        }
        Ok(Self { levels, mips, quantized })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Option<&[u8]> {
        let s = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }
    fn u32(&mut self) -> Option<u32> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }
    fn f32(&mut self) -> Option<f32> {
        Some(f32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }
    fn f64(&mut self) -> Option<f64> {
        Some(f64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }
}
