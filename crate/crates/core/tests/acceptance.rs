//! Acceptance criteria, one test per criterion. Each prints a single
//! `criterion <n> <name>: PASS|FAIL ...` line straight to stdout.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use glint_ibl::brdf::{AlbedoTables, TableResolution, DEFAULT_TABLE_SAMPLES};
use glint_ibl::commands::render_command;
use glint_ibl::config::RawConfig;
use glint_ibl::envmap::{
    compute_levels, prefilter, EnvironmentMap, PrefilterOptions, PrefilteredEnv, WeightSpace,
};
use glint_ibl::math::{Rgb, Vec3};
use glint_ibl::render::{Renderer, ShadeMode};
use glint_ibl::validate::*;

const SEED: u64 = 20_240_601;

fn tables() -> &'static AlbedoTables {
    static T: OnceLock<AlbedoTables> = OnceLock::new();
    T.get_or_init(|| AlbedoTables::build(TableResolution::default(), DEFAULT_TABLE_SAMPLES).unwrap())
}

fn three_region() -> &'static (EnvironmentMap, PrefilteredEnv) {
    static E: OnceLock<(EnvironmentMap, PrefilteredEnv)> = OnceLock::new();
    E.get_or_init(|| three_region_setup(8, 256).unwrap())
}

/// Print the verdict line and fail the test on FAIL.
fn verdict(n: u32, name: &str, pass: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let ok = pass && elapsed < budget;
    let line = format!(
        "criterion {n:>2} {name}: {} [{:.1} s of {} s] {detail}\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(ok, "{line}");
}

fn summarize(lines: &[ReportLine]) -> (bool, String) {
    let pass = lines.iter().all(ReportLine::passed);
    let worst = lines
        .iter()
        .find(|l| !l.passed())
        .or_else(|| lines.iter().max_by(|a, b| (a.value / a.threshold.max(1e-300)).total_cmp(&(b.value / b.threshold.max(1e-300)))))
        .map(|l| format!("({} {} = {:.3e}, limit {:.3e})", l.name, l.metric, l.value, l.threshold))
        .unwrap_or_default();
    (pass, worst)
}

#[test]
fn criterion_01_small_n_exactness() {
    let t = Instant::now();
    let lines = small_n_exactness(1_000_000, SEED);
    let (pass, d) = summarize(&lines);
    verdict(1, "small-N exactness", pass && lines.len() == 15, t.elapsed(), Duration::from_secs(30), &d);
}

#[test]
fn criterion_02_min_probability_identity() {
    let t = Instant::now();
    let line = min_probability_identity(100_000, SEED);
    let d = format!("({} violations)", line.value);
    verdict(2, "min-probability identity", line.passed(), t.elapsed(), Duration::from_secs(5), &d);
}

#[test]
fn criterion_03_pow_fix() {
    let t = Instant::now();
    let (report, _) = pow_report(None).unwrap();
    let naive = report.find("pow_naive_failure_region", "max_abs_err").unwrap();
    let stable = report.find("pow_stable_grid", "max_abs_err").unwrap();
    let d = format!("(naive {:.3}, stable {:.3e})", naive.value, stable.value);
    verdict(3, "stable pow", naive.passed() && stable.passed(), t.elapsed(), Duration::from_secs(10), &d);
}

#[test]
fn criterion_04_gate_probabilities() {
    let t = Instant::now();
    let lines = gate_probabilities(1_000_000, SEED);
    let (pass, d) = summarize(&lines);
    verdict(4, "gate probabilities", pass && lines.len() == 8, t.elapsed(), Duration::from_secs(30), &d);
}

#[test]
fn criterion_05_multinomial() {
    let t = Instant::now();
    let lines = multinomial_marginals(100_000, SEED);
    let (pass, d) = summarize(&lines);
    verdict(5, "multinomial conservation and marginals", pass, t.elapsed(), Duration::from_secs(60), &d);
}

#[test]
fn criterion_06_white_furnace() {
    let t = Instant::now();
    let opts = FurnaceOptions {
        seed: SEED,
        ..Default::default()
    };
    let report = furnace_report(&opts, tables(), None).unwrap();
    let means: Vec<ReportLine> = report
        .lines
        .iter()
        .filter(|l| l.name.starts_with("furnace_mean_"))
        .cloned()
        .collect();
    let (pass, d) = summarize(&means);
    let values: Vec<String> = means.iter().map(|l| format!("{:.4}", l.value)).collect();
    verdict(
        6,
        "white furnace",
        pass && means.len() == 3,
        t.elapsed(),
        Duration::from_secs(600),
        &format!("{d} per density [{}]", values.join(", ")),
    );
}

#[test]
fn criterion_07_high_density() {
    let t = Instant::now();
    let (env, penv) = three_region();
    let setup = SphereSetup {
        log_n0: 30.0,
        ..Default::default()
    };
    let renderer = Renderer::new(setup.scene().unwrap(), env, penv, tables()).unwrap();
    let smooth = renderer.smooth().luminance();
    let glint = renderer.realization(ShadeMode::Glint, SEED).unwrap().luminance();
    let stats = masked_relative_error(&glint, &smooth, &renderer.hit_mask(), LUMINANCE_FLOOR);
    let d = format!("(mean_rel_err {:.3e} over {} pixels)", stats.mean, stats.pixels);
    verdict(7, "high-density convergence", stats.mean < 0.02, t.elapsed(), Duration::from_secs(60), &d);
}

#[test]
fn criterion_08_reference_agreement() {
    let t = Instant::now();
    let (env, penv) = three_region();
    let opts = ReferenceOptions {
        seed: SEED,
        ..Default::default()
    };
    let report = reference_agreement(&opts, env, penv, tables()).unwrap();
    let (pass, _) = summarize(&report.lines);
    let mean = report.find("reference_mean_agreement", "mean_rel_err").unwrap().value;
    let frac = report.find("reference_glint_fraction", "rel_diff").unwrap().value;
    let d = format!("(mean_rel_err {mean:.4}, glint fraction rel_diff {frac:.4}; {})", report.notes.join("; "));
    verdict(8, "ground-truth agreement", pass, t.elapsed(), Duration::from_secs(900), &d);
}

#[test]
fn criterion_09_partition_of_unity() {
    let t = Instant::now();
    let noisy = EnvironmentMap::from_fn(64, |d: Vec3| {
        let s = (13.0 * d.x).sin() * (7.0 * d.y).cos() + (5.0 * d.z).sin();
        Rgb::splat((3.0 * s).exp())
    });
    let envs = [
        ("white", EnvironmentMap::constant(32, Rgb::WHITE)),
        ("three_region", EnvironmentMap::three_region(128)),
        ("noisy", noisy),
    ];
    let mut worst = 0.0f64;
    let mut texels = 0usize;
    for (_, env) in &envs {
        for space in [WeightSpace::Linear, WeightSpace::Log] {
            for quantize in [false, true] {
                let levels = compute_levels(env, 8, 1e-3, space).unwrap();
                let options = PrefilterOptions {
                    base_height: 32,
                    samples_per_texel: 64,
                    quantize_weights: quantize,
                    ..Default::default()
                };
                let penv = prefilter(env, &levels, options).unwrap();
                let k = penv.k();
                for mip in penv.mips() {
                    for texel in mip.data.chunks_exact(3 + k) {
                        let sum: f64 = texel[3..].iter().map(|w| *w as f64).sum();
                        worst = worst.max((sum - 1.0).abs());
                        texels += 1;
                    }
                }
            }
        }
    }
    let d = format!("(max |sum - 1| {worst:.3e} over {texels} texels)");
    verdict(9, "partition of unity", worst <= 1e-3, t.elapsed(), Duration::from_secs(10), &d);
}

#[test]
fn criterion_10_environment_sensitivity() {
    let t = Instant::now();
    let (env, penv) = three_region();
    let opts = RotationOptions {
        seed: SEED,
        ..Default::default()
    };
    let report = rotation_sensitivity(&opts, env, penv, tables()).unwrap();
    let (pass, _) = summarize(&report.lines);
    let ours = report.find("rotation_glint_change", "jaccard").unwrap().value;
    let baseline = report.find("rotation_const_p_change", "jaccard").unwrap().value;
    let d = format!("(glint change {ours:.3}, const-p change {baseline:.3})");
    verdict(10, "environment sensitivity", pass, t.elapsed(), Duration::from_secs(120), &d);
}

#[test]
fn criterion_11_determinism() {
    let t = Instant::now();
    let mut raw = RawConfig::default();
    for (k, v) in [
        ("scene.width", "128"),
        ("scene.height", "128"),
        ("envmap.base_height", "32"),
        ("envmap.samples", "64"),
        ("output.formats", ""),
        ("seed.value", "77"),
    ] {
        raw.set(k, v).unwrap();
    }
    let cfg = raw.resolve().unwrap();
    let render_with = |threads: usize, mode: &str| {
        let mut cfg = cfg.clone();
        cfg.mode = ShadeMode::parse(mode, 20.0).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| render_command(&cfg, tables()).unwrap().image)
    };
    let mut identical = true;
    for mode in ["glint", "reference"] {
        let (a, b) = (render_with(1, mode), render_with(8, mode));
        identical &= a.data.iter().zip(&b.data).all(|(x, y)| x.to_bits() == y.to_bits()) && a.data.len() == b.data.len();
    }
    verdict(11, "determinism", identical, t.elapsed(), Duration::from_secs(60), "(glint and reference, 1 vs 8 threads)");
}
