// White-furnace test: averaged glint renders converge to the smooth render,
// and lower microfacet densities give fewer but brighter glints.

use glint_ibl::brdf::{AlbedoTables, TableResolution, DEFAULT_TABLE_SAMPLES};
use glint_ibl::validate::{furnace_report, FurnaceOptions, SphereSetup, ValidationReport};

pub fn run_example() -> ValidationReport {
    let dir = std::env::temp_dir().join("glint-ibl-examples");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let tables = AlbedoTables::build(TableResolution::default(), DEFAULT_TABLE_SAMPLES).expect("tables");
    let opts = FurnaceOptions {
        setup: SphereSetup {
            resolution: 64,
            ..Default::default()
        },
        log_densities: vec![-4.0, 0.0, 2.0],
        realizations: 256,
        seed: 3,
        levels: 4,
    };
    furnace_report(&opts, &tables, Some(&dir)).expect("furnace")
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
