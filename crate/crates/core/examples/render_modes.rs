// One sphere under the sun/sky/ground environment in every shading mode:
// smooth split-sum, glint, constant-probability glints and the explicit
// microfacet reference.

use glint_ibl::brdf::{AlbedoTables, TableResolution, DEFAULT_TABLE_SAMPLES};
use glint_ibl::render::{tonemap_write, Renderer, ShadeMode};
use glint_ibl::validate::{glint_fraction, three_region_setup, SphereSetup};

pub struct ModeStats {
    pub mode: ShadeMode,
    pub mean_luminance: f64,
    pub glint_fraction: f64,
    pub finite: bool,
}

pub fn run_example() -> Vec<ModeStats> {
    let dir = std::env::temp_dir().join("glint-ibl-examples");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let tables = AlbedoTables::build(TableResolution::default(), DEFAULT_TABLE_SAMPLES).expect("tables");
    let (env, penv) = three_region_setup(8, 128).expect("environment");
    let setup = SphereSetup {
        resolution: 96,
        log_density: -1.0,
        ..Default::default()
    };
    let renderer = Renderer::new(setup.scene().expect("scene"), &env, &penv, &tables).expect("renderer");
    let mask = renderer.hit_mask();
    let smooth = renderer.smooth().luminance();
    let modes = [
        ShadeMode::Smooth,
        ShadeMode::Glint,
        ShadeMode::ConstP { gamma_deg: 20.0 },
        ShadeMode::Reference,
    ];
    modes
        .into_iter()
        .map(|mode| {
            let img = renderer.realization(mode, 42).expect("render");
            tonemap_write(&img, 0.0, &dir.join(format!("sphere_{}.png", mode.name()))).expect("write");
            let lum = img.luminance();
            let fg: Vec<f64> = lum.iter().zip(&mask).filter(|(_, m)| **m).map(|(l, _)| *l).collect();
            ModeStats {
                mode,
                mean_luminance: fg.iter().sum::<f64>() / fg.len() as f64,
                glint_fraction: glint_fraction(&lum, &smooth, &mask),
                finite: img.is_finite(),
            }
        })
        .collect()
}

#[allow(dead_code)]
fn main() {
    for s in run_example() {
        println!(
            "{:<10} mean foreground luminance {:.4}  glint pixels {:.2}%",
            s.mode.name(),
            s.mean_luminance,
            100.0 * s.glint_fraction
        );
    }
    println!("images in {}", std::env::temp_dir().join("glint-ibl-examples").display());
}
