//! `(1 − p)^N` in 32-bit floating point.
//!
//! For small `p`, `1 − p` rounds to 1 in single precision and the power
//! collapses to 1 even when `N·p` is large. Rewriting it as
//! `(1 − c·p)^(N/c)` with `c = max(1, ε/p)` keeps the base representable.

/// `ε = 10^-3.54`, the smallest `p` for which the direct power stays accurate.
pub const POW_EPSILON: f32 = 2.884_031_5e-4;

/// Stabilised `(1 − p)^N`, every intermediate rounded to `f32`.
pub fn stable_pow_one_minus(p: f32, n: f32) -> f32 {
    if n == 0.0 || p <= 0.0 {
        return 1.0;
    }
    let c = (POW_EPSILON / p).max(1.0);
    let base = 1.0 - c * p;
    base.max(0.0).powf(n / c)
}

/// The direct single-precision evaluation, kept for comparison.
pub fn naive_pow_one_minus(p: f32, n: f32) -> f32 {
    (1.0 - p).powf(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_constant() {
        assert!((POW_EPSILON as f64 - 10f64.powf(-3.54)).abs() < 1e-10);
    }

    #[test]
    fn small_exact_case() {
        assert!((stable_pow_one_minus(0.5, 2.0) - 0.25).abs() < 1e-6);
        assert_eq!(stable_pow_one_minus(0.3, 0.0), 1.0);
        assert_eq!(stable_pow_one_minus(1.0, 3.5), 0.0);
        assert_eq!(stable_pow_one_minus(0.0, 1e9), 1.0);
    }

    #[test]
    fn tiny_probability_many_trials() {
        // exp(N·ln(1−p)) at p = 1e-9, N = 1e10 is e^-10 (to 1e-9 relative).
        let v = stable_pow_one_minus(1e-9, 1e10);
        assert!((v as f64 - (-10f64).exp()).abs() < 1e-6, "{v}");
        // Naive evaluation collapses to 1; the stabilised one goes to e^-100 ≈ 0.
        assert_eq!(naive_pow_one_minus(1e-10, 1e12), 1.0);
        assert!(stable_pow_one_minus(1e-10, 1e12).abs() < 1e-6);
    }
}
