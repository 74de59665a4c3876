// Prefiltering an environment into radiance and level-weight mips.
//
// Writes the synthetic sun/sky/ground environment as PFM, loads it back,
// prefilters it with K = 8 levels and round-trips the binary cache.

use glint_ibl::envmap::{
    compute_levels, load_envmap, prefilter, write_pfm, EnvironmentMap, PfmImage, PrefilterOptions, PrefilteredEnv,
    WeightSpace,
};
use glint_ibl::math::Vec3;

pub struct PrefilterSummary {
    pub penv: PrefilteredEnv,
    pub cache_round_trip: bool,
    pub max_partition_error: f64,
    pub sun_weights: Vec<f64>,
}

pub fn run_example() -> PrefilterSummary {
    let dir = std::env::temp_dir().join("glint-ibl-examples");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let env = EnvironmentMap::three_region(64);
    let pfm = dir.join("three_region.pfm");
    write_pfm(
        &pfm,
        &PfmImage {
            width: env.width(),
            height: env.height(),
            data: env.texels().to_vec(),
        },
    )
    .expect("write env");
    let env = load_envmap(&pfm).expect("load env");

    let levels = compute_levels(&env, 8, 1e-3, WeightSpace::Linear).expect("levels");
    let options = PrefilterOptions {
        base_height: 32,
        samples_per_texel: 256,
        ..Default::default()
    };
    let penv = prefilter(&env, &levels, options).expect("prefilter");

    let cache = dir.join("three_region.gibp");
    penv.save(&cache).expect("save cache");
    let cache_round_trip = PrefilteredEnv::load(&cache).expect("load cache") == penv;

    let k = penv.k();
    let max_partition_error = penv
        .mips()
        .iter()
        .flat_map(|m| m.data.chunks_exact(3 + k))
        .map(|t| (t[3..].iter().map(|w| *w as f64).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);

    let sun = Vec3::new(0.55, 0.55, -0.63).normalized();
    let (_, sun_weights) = penv.sample_prefiltered(sun, 0.16);
    PrefilterSummary {
        penv,
        cache_round_trip,
        max_partition_error,
        sun_weights,
    }
}

#[allow(dead_code)]
fn main() {
    let s = run_example();
    println!("levels {:?}", s.penv.levels().values());
    for m in s.penv.mips() {
        println!("mip {}x{} alpha {:.4}", m.width, m.height, m.alpha);
    }
    println!("cache round trip exact: {}", s.cache_round_trip);
    println!("max |sum w - 1|: {:.2e}", s.max_partition_error);
    let w: Vec<String> = s.sun_weights.iter().map(|x| format!("{x:.3}")).collect();
    println!("weights toward the sun at alpha 0.16: [{}]", w.join(", "));
}
