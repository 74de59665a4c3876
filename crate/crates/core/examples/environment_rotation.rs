// Rotating the environment moves glints under the glint model but leaves the
// constant-probability pattern untouched.

use glint_ibl::brdf::{AlbedoTables, TableResolution, DEFAULT_TABLE_SAMPLES};
use glint_ibl::validate::{rotation_sensitivity, three_region_setup, RotationOptions, SphereSetup, ValidationReport};

pub fn run_example() -> ValidationReport {
    let tables = AlbedoTables::build(TableResolution::default(), DEFAULT_TABLE_SAMPLES).expect("tables");
    let (env, penv) = three_region_setup(8, 128).expect("environment");
    let opts = RotationOptions {
        setup: SphereSetup {
            resolution: 96,
            ..Default::default()
        },
        seed: 5,
        ..Default::default()
    };
    rotation_sensitivity(&opts, &env, &penv, &tables).expect("rotation")
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
