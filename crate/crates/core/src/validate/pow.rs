use std::path::Path;

use dashu_float::FBig;

use crate::counting::{naive_pow_one_minus, stable_pow_one_minus, POW_EPSILON};
use crate::error::Result;
use crate::render::ImageBuffer;

use super::report::{Bound, ReportLine, ValidationReport};

/// Grid points per axis: `p = 10^(−16 + i/2)`, `N = 10^(j/2)`.
pub const GRID: usize = 33;
/// Working precision of the oracle, in bits.
pub const ORACLE_BITS: usize = 192;

pub fn grid_p(i: usize) -> f32 {
    10f64.powf(-16.0 + 0.5 * i as f64) as f32
}

pub fn grid_n(j: usize) -> f32 {
    10f64.powf(0.5 * j as f64) as f32
}

/// `(1 − p)^N = exp(N · log1p(−p))` in `ORACLE_BITS`-bit binary floating point.
pub fn oracle_pow_one_minus(p: f64, n: f64) -> f64 {
    if n == 0.0 || p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    if -n * (-p).ln_1p() > 1e4 {
        return 0.0;
    }
    let big = |x: f64| -> FBig { FBig::try_from(x).expect("finite").with_precision(ORACLE_BITS).value() };
    let exponent = big(n) * (-big(p)).ln_1p();
    exponent.exp().to_f64().value()
}

/// Absolute error maps of the naive and stabilised 32-bit evaluations
/// (rows index `N`, columns index `p`).
#[derive(Debug, Clone)]
pub struct PowErrorMaps {
    pub naive: Vec<f64>,
    pub stable: Vec<f64>,
}

impl PowErrorMaps {
    pub fn compute() -> Self {
        let mut naive = vec![0.0; GRID * GRID];
        let mut stable = vec![0.0; GRID * GRID];
        for j in 0..GRID {
            for i in 0..GRID {
                let (p, n) = (grid_p(i), grid_n(j));
                let exact = oracle_pow_one_minus(p as f64, n as f64);
                naive[j * GRID + i] = (naive_pow_one_minus(p, n) as f64 - exact).abs();
                stable[j * GRID + i] = (stable_pow_one_minus(p, n) as f64 - exact).abs();
            }
        }
        Self { naive, stable }
    }

    /// Largest naive error where `p < 10^-7.525` and `N > 1/p`.
    pub fn naive_failure_region_max(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..GRID {
            for i in 0..GRID {
                let (p, n) = (grid_p(i) as f64, grid_n(j) as f64);
                if p < 10f64.powf(-7.525) && n > 1.0 / p {
                    worst = worst.max(self.naive[j * GRID + i]);
                }
            }
        }
        worst
    }

    fn image(map: &[f64]) -> ImageBuffer {
        ImageBuffer {
            width: GRID,
            height: GRID,
            data: map.iter().flat_map(|&e| [e as f32; 3]).collect(),
        }
    }

    /// Write `pow_error_naive.pfm` and `pow_error_stable.pfm` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        Self::image(&self.naive).write_pfm(&dir.join("pow_error_naive.pfm"))?;
        Self::image(&self.stable).write_pfm(&dir.join("pow_error_stable.pfm"))
    }
}

pub fn pow_report(out_dir: Option<&Path>) -> Result<(ValidationReport, PowErrorMaps)> {
    let maps = PowErrorMaps::compute();
    if let Some(dir) = out_dir {
        maps.write(dir)?;
    }
    let mut r = ValidationReport::new("validate-pow");
    r.header.push(format!(
        "oracle exp(N*log1p(-p)) at {ORACLE_BITS}-bit binary precision on the f32-rounded grid p=10^(-16..0), N=10^(0..16), {GRID}x{GRID}"
    ));
    r.header.push(format!("epsilon {POW_EPSILON:e}; every stabilised intermediate is f32"));
    r.push(ReportLine::new(
        "pow_naive_failure_region",
        "max_abs_err",
        maps.naive_failure_region_max(),
        Bound::AtLeast,
        0.9,
    ));
    r.push(ReportLine::new(
        "pow_stable_grid",
        "max_abs_err",
        maps.stable.iter().copied().fold(0.0, f64::max),
        Bound::AtMost,
        1e-3,
    ));
    let zero_row = (0..GRID)
        .map(|i| {
            let p = grid_p(i);
            let exact = oracle_pow_one_minus(p as f64, 0.0);
            (naive_pow_one_minus(p, 0.0) as f64 - exact)
                .abs()
                .max((stable_pow_one_minus(p, 0.0) as f64 - exact).abs())
        })
        .fold(0.0, f64::max);
    r.push(ReportLine::new("pow_zero_trials", "max_abs_err", zero_row, Bound::AtMost, 0.0));
    r.note(format!(
        "naive grid max abs error {:.3e}",
        maps.naive.iter().copied().fold(0.0, f64::max)
    ));
    Ok((r, maps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_matches_closed_forms() {
        assert!((oracle_pow_one_minus(0.5, 3.0) - 0.125).abs() < 1e-16);
        let v = oracle_pow_one_minus(1e-9, 1e9);
        assert!((v - (-1.0f64).exp()).abs() < 1e-9);
        assert_eq!(oracle_pow_one_minus(0.3, 0.0), 1.0);
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(grid_p(32), 1.0);
        assert_eq!(grid_n(0), 1.0);
        assert!((grid_p(0) as f64 / 1e-16 - 1.0).abs() < 1e-6);
    }
}
