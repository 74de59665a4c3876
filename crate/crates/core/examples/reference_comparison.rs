// Glint shading against an explicit per-footprint microfacet reference on
// the sun/sky/ground environment.

use glint_ibl::brdf::{AlbedoTables, TableResolution, DEFAULT_TABLE_SAMPLES};
use glint_ibl::validate::{reference_agreement, three_region_setup, ReferenceOptions, SphereSetup, ValidationReport};

pub fn run_example() -> ValidationReport {
    let tables = AlbedoTables::build(TableResolution::default(), DEFAULT_TABLE_SAMPLES).expect("tables");
    let (env, penv) = three_region_setup(8, 128).expect("environment");
    let opts = ReferenceOptions {
        setup: SphereSetup {
            resolution: 64,
            ..Default::default()
        },
        realizations: 64,
        seed: 9,
        ..Default::default()
    };
    reference_agreement(&opts, &env, &penv, &tables).expect("comparison")
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
