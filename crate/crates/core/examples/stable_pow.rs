// Single-precision `(1 − p)^N`: the direct power against the stabilised
// rewrite, measured on a 33×33 log grid against a 192-bit oracle.

use glint_ibl::validate::{pow_report, ValidationReport};

pub fn run_example() -> ValidationReport {
    let dir = std::env::temp_dir().join("glint-ibl-examples");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let (report, _maps) = pow_report(Some(&dir)).expect("pow report");
    report
}

#[allow(dead_code)]
fn main() {
    let report = run_example();
    print!("{report}");
    println!("error maps written to {}", std::env::temp_dir().join("glint-ibl-examples").display());
}
