//! Every runnable example, executed through its `run_example` entry point.

mod counting {
    include!("../examples/counting.rs");
}
mod stable_pow {
    include!("../examples/stable_pow.rs");
}
mod radiance_levels {
    include!("../examples/radiance_levels.rs");
}
mod prefilter {
    include!("../examples/prefilter.rs");
}
mod albedo_tables {
    include!("../examples/albedo_tables.rs");
}
mod glint_grid {
    include!("../examples/glint_grid.rs");
}
mod render_modes {
    include!("../examples/render_modes.rs");
}
mod white_furnace {
    include!("../examples/white_furnace.rs");
}
mod reference_comparison {
    include!("../examples/reference_comparison.rs");
}
mod environment_rotation {
    include!("../examples/environment_rotation.rs");
}
mod config_render {
    include!("../examples/config_render.rs");
}

use glint_ibl::render::ShadeMode;

#[test]
fn counting_example() {
    let s = counting::run_example();
    assert!(s.tv_n2 < 0.005, "{}", s.tv_n2);
    assert!(s.always_conserved);
    for (m, e) in s.multinomial_means.iter().zip(&s.multinomial_expected) {
        assert!((m - e).abs() < 0.03 * e, "{m} vs {e}");
    }
}

#[test]
fn stable_pow_example() {
    let r = stable_pow::run_example();
    assert!(r.all_passed(), "{r}");
    let dir = std::env::temp_dir().join("glint-ibl-examples");
    assert!(dir.join("pow_error_stable.pfm").exists());
}

#[test]
fn radiance_levels_example() {
    let s = radiance_levels::run_example();
    let l = s.levels.values();
    assert_eq!(l[0], 0.0);
    assert!((l[3] - 5f64.exp()).abs() < 0.05 * 5f64.exp(), "{l:?}");
    for (lum, w, recon) in &s.probes {
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let clamped = lum.min(l[3]);
        if *lum == 0.0 || *lum >= l[1] {
            assert!((recon - clamped).abs() < 1e-9 * clamped.max(1.0), "{lum} -> {recon}");
        }
    }
}

#[test]
fn prefilter_example() {
    let s = prefilter::run_example();
    assert!(s.cache_round_trip);
    assert!(s.max_partition_error < 1e-3);
    // Toward the sun the brightest level dominates.
    let top = s.sun_weights.len() - 1;
    assert!(s.sun_weights[top] > 0.5, "{:?}", s.sun_weights);
}

#[test]
fn albedo_tables_example() {
    for r in albedo_tables::run_example() {
        assert!((r.d_total - r.d_total_closed_form).abs() < 2e-3 * r.d_total_closed_form);
        assert!(r.d_visible <= r.d_total + 1e-12);
        assert!(r.scale + r.bias <= 1.0 + 1e-9 && r.scale >= 0.0 && r.bias >= 0.0);
    }
}

#[test]
fn glint_grid_example() {
    let s = glint_grid::run_example();
    let total: f64 = s.vertices.iter().map(|v| v.weight).sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(s.vertices.iter().all(|v| (v.count - s.expected_count).abs() < 1e-9));
    assert!((s.mean_modulation - 1.0).abs() < 0.03, "{}", s.mean_modulation);
}

#[test]
fn render_modes_example() {
    let stats = render_modes::run_example();
    assert_eq!(stats.len(), 4);
    assert!(stats.iter().all(|s| s.finite && s.mean_luminance > 0.0));
    let smooth = &stats[0];
    assert_eq!(smooth.mode, ShadeMode::Smooth);
    assert_eq!(smooth.glint_fraction, 0.0);
    assert!(stats[1].glint_fraction > 0.0 && stats[3].glint_fraction > 0.0);
    assert!(stats[2].glint_fraction < stats[1].glint_fraction);
}

#[test]
fn white_furnace_example() {
    let r = white_furnace::run_example();
    assert!(r.find("furnace_smooth_vs_table", "max_rel_err").unwrap().passed(), "{r}");
    assert!(r.find("furnace_sparsity_tradeoff", "fraction_gap").unwrap().passed(), "{r}");
    for l in r.lines.iter().filter(|l| l.name.starts_with("furnace_mean_")) {
        assert!(l.value < 0.05, "{l}");
    }
}

#[test]
fn reference_comparison_example() {
    let r = reference_comparison::run_example();
    let mean = r.find("reference_mean_agreement", "mean_rel_err").unwrap().value;
    assert!(mean.is_finite() && mean < 0.15, "{r}");
}

#[test]
fn environment_rotation_example() {
    let r = environment_rotation::run_example();
    assert_eq!(r.find("rotation_const_p_change", "jaccard").unwrap().value, 0.0);
    assert!(r.find("rotation_glint_change", "jaccard").unwrap().value > 0.0);
}

#[test]
fn config_render_example() {
    let (cfg, out) = config_render::run_example();
    assert_eq!(cfg.seed, 1234);
    assert_eq!(cfg.levels, 6);
    assert_eq!(out.files.len(), 2);
    assert!(out.files.iter().all(|f| f.exists()));
    assert!(out.image.is_finite());
}
