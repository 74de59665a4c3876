//! Normal quantile by Acklam's rational approximation (relative error
//! below 1.2e-9 over the full open interval).

const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

const P_LOW: f64 = 0.02425;
const XI_MIN: f64 = 1e-12;

/// Standard normal quantile Φ⁻¹(ξ); ξ is clamped into the open unit interval.
pub fn standard_normal_quantile(xi: f64) -> f64 {
    let p = xi.clamp(XI_MIN, 1.0 - XI_MIN);
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Quantile of `N(mu, sigma2)`.
pub fn inverse_normal_cdf(xi: f64, mu: f64, sigma2: f64) -> f64 {
    if sigma2 <= 0.0 {
        return mu;
    }
    mu + sigma2.sqrt() * standard_normal_quantile(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erfc;

    fn phi(x: f64) -> f64 {
        0.5 * erfc(-x / std::f64::consts::SQRT_2)
    }

    /// Quantile by bisection on an erfc-based CDF.
    fn quantile_oracle(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0f64, 40.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn median_and_degenerate_variance() {
        assert_eq!(inverse_normal_cdf(0.5, 3.0, 2.0), 3.0);
        assert_eq!(inverse_normal_cdf(0.9, -1.5, 0.0), -1.5);
        assert_eq!(inverse_normal_cdf(0.01, 7.0, 0.0), 7.0);
    }

    #[test]
    fn one_sigma_point() {
        assert!((inverse_normal_cdf(0.8413, 0.0, 1.0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn accuracy_against_erfc_bisection() {
        let mut points = Vec::new();
        for k in 0..=400 {
            // log-spaced tails from 1e-9 up to 0.5
            let t = -9.0 + 9.0 * (k as f64 / 400.0) * (0.5f64.log10() + 9.0) / 9.0;
            let p = 10f64.powf(t);
            points.push(p);
            points.push(1.0 - p);
        }
        for k in 1..1000 {
            points.push(k as f64 / 1000.0);
        }
        let worst = points
            .iter()
            .filter(|p| (1e-9..=1.0 - 1e-9).contains(*p))
            .map(|&p| (standard_normal_quantile(p) - quantile_oracle(p)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-6, "max abs error {worst}");
    }

    #[test]
    fn clamps_endpoints() {
        assert!(standard_normal_quantile(0.0).is_finite());
        assert!(standard_normal_quantile(1.0).is_finite());
        assert!(standard_normal_quantile(0.0) < -6.0);
    }
}
