//! Validation reports backing the command-line checks.

mod compare;
mod counting;
mod pow;
mod report;
mod scenes;

pub use compare::{
    compare_files, compare_images, glint_fraction, glint_mask, jaccard_distance, masked_relative_error, relative_error,
    ErrorStats,
};
pub use counting::{
    counting_report, dual_gated_symmetry, gate_probabilities, gating_conservation, gating_error_map,
    min_probability_identity, multinomial_marginals, random_probabilities, single_gated_asymmetry, small_n_exactness,
    MIN_DRAWS,
};
pub use pow::{grid_n, grid_p, oracle_pow_one_minus, pow_report, PowErrorMaps, GRID, ORACLE_BITS};
pub use report::{Bound, ReportLine, ValidationReport};
pub use scenes::{
    furnace_report, reference_agreement, rotation_sensitivity, three_region_setup, FurnaceOptions, ReferenceOptions,
    RotationOptions, SphereSetup, DEFAULT_UV_SCALE, LUMINANCE_FLOOR, MIN_FURNACE_REALIZATIONS,
};
