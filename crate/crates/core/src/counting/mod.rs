//! Constant-time approximate binomial and multinomial sampling.
//!
//! The shading path uses [`dual_gated`] inside [`sample_multinomial`]; the
//! exact samplers in [`exact`] exist to validate it.

pub mod exact;
mod gating;
mod multinomial;
mod normal;
mod pow;
mod rng;

pub use exact::{binomial_pmf, sample_binomial_exact, sample_multinomial_exact, total_variation};
pub use gating::{dual_gated, dual_gated_matched, single_gated, GatingOutcome};
pub use multinomial::{sample_multinomial, BinCountVector};
pub use normal::{inverse_normal_cdf, standard_normal_quantile};
pub use pow::{naive_pow_one_minus, stable_pow_one_minus, POW_EPSILON};
pub use rng::{mix64, RandomStream};
