//! Gated-Gaussian approximations of binomial sampling with real-valued
//! trial counts.

use super::normal::inverse_normal_cdf;
use super::pow::stable_pow_one_minus;
use statrs::function::erf::erfc;

/// Positive and negative sample counts from one dual-gated draw.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GatingOutcome {
    pub n_pos: f64,
    pub n_neg: f64,
}

#[inline]
fn mask(cond: bool) -> f64 {
    cond as u8 as f64
}

/// Single-gated Gaussian generalised to `N ≥ 0`.
///
/// The gate passes with probability `min(N·p, 1 − (1 − p)^N)`; on a pass the
/// count is a normal draw clamped to `[1, max(N, 1)]`. No floor is applied.
pub fn single_gated(n: f64, p: f64, xi1: f64, xi2: f64) -> f64 {
    if n <= 0.0 || p <= 0.0 {
        return 0.0;
    }
    let p = p.min(1.0);
    let at_least_one = 1.0 - stable_pow_one_minus(p as f32, n as f32) as f64;
    let gate = (n * p).min(at_least_one);
    let rest = n - 1.0;
    let mu = 1.0 + rest * p;
    let sigma2 = (rest * p * (1.0 - p)).max(0.0);
    let count = inverse_normal_cdf(xi2, mu, sigma2).clamp(1.0, n.max(1.0));
    mask(xi1 < gate) * count
}

/// Dual-gated Gaussian: gates on at least one positive and at least one
/// negative sample, exact for `N ∈ {0, 1, 2}` and dithered between those
/// rows for fractional `N < 2`.
///
/// Uses one uniform for every gating decision and one for the normal draw.
pub fn dual_gated(n: f64, p: f64, xi1: f64, xi2: f64) -> GatingOutcome {
    dual_gated_impl(n, p, xi1, xi2, Interior::Nominal)
}

/// Dual gating with the interior draw moment-matched to the binomial
/// conditioned on `1 ≤ n ≤ N − 1` and corrected for clamping, so the
/// expected split equals `N·p` for every `N`.
///
/// With `dither = Some(ξ₃)` the interior count is stochastically rounded;
/// integral `N` then splits into integral halves.
pub fn dual_gated_matched(n: f64, p: f64, xi1: f64, xi2: f64, dither: Option<f64>) -> GatingOutcome {
    dual_gated_impl(n, p, xi1, xi2, Interior::Matched { dither })
}

#[derive(Clone, Copy)]
enum Interior {
    Nominal,
    Matched { dither: Option<f64> },
}

fn dual_gated_impl(n: f64, p: f64, xi1: f64, xi2: f64, interior: Interior) -> GatingOutcome {
    let n = n.max(0.0);
    // Certain outcomes: c = ε/p is undefined at p = 0.
    if p <= 0.0 {
        return GatingOutcome { n_pos: 0.0, n_neg: n };
    }
    if p >= 1.0 {
        return GatingOutcome { n_pos: n, n_neg: 0.0 };
    }
    let q = 1.0 - p;
    let n2 = n.max(2.0);

    let all_weight = (n - 1.0).clamp(0.0, 1.0);
    let p_all_pos = all_weight * stable_pow_one_minus(q as f32, n2 as f32) as f64;
    let p_all_neg = all_weight * stable_pow_one_minus(p as f32, n2 as f32) as f64;
    let one_weight = (1.0 - (1.0 - n).abs()).max(0.0);
    let p_one_pos = one_weight * p;
    let p_one_neg = one_weight * q;

    let m_all_pos = mask(xi1 < p_all_pos);
    let m_pos = mask(xi1 < p_all_pos + p_one_pos);
    let m_all_neg = mask(1.0 - p_all_neg <= xi1);
    let m_neg = mask(1.0 - p_all_neg - p_one_neg <= xi1);
    let m_gauss = mask(n > 1.0) * (1.0 - m_pos) * (1.0 - m_neg);

    let hi = n2 - 1.0;
    let mut g = match interior {
        Interior::Nominal => inverse_normal_cdf(xi2, 1.0 + (n2 - 2.0) * p, (n2 - 2.0) * p * q),
        Interior::Matched { .. } => {
            let (mean, var) = interior_moments(n2, p);
            let mu = clamp_corrected_mean(mean, var.sqrt(), 1.0, hi);
            inverse_normal_cdf(xi2, mu, var)
        }
    }
    .clamp(1.0, hi);
    if let Interior::Matched { dither: Some(u) } = interior {
        g = (g + u).floor().clamp(1.0, hi);
    }
    // Snap to the ulp grid of N so that G + (N − G) == N exactly.
    g = (g + n2) - n2;
    let g_bar = n2 - g;

    GatingOutcome {
        n_pos: m_all_pos * (n2 - 1.0) + m_pos + m_gauss * g,
        n_neg: m_all_neg * (n2 - 1.0) + m_neg + m_gauss * g_bar,
    }
}

/// Mean and variance of Binomial(N, p) conditioned on `1 ≤ n ≤ N − 1`.
fn interior_moments(n: f64, p: f64) -> (f64, f64) {
    let q = 1.0 - p;
    let pn = (n * p.ln()).exp();
    let z = -(n * (-p).ln_1p()).exp_m1() - pn;
    if !(z > 1e-300) {
        return (1.0 + (n - 2.0) * p, (n - 2.0) * p * q);
    }
    let mean = (n * p - n * pn) / z;
    let second = (n * p * q + n * n * p * p - n * n * pn) / z;
    (mean.clamp(1.0, n - 1.0), (second - mean * mean).max(0.0))
}

/// Location `μ` such that `E[clamp(X, lo, hi)] = target` for `X ~ N(μ, σ²)`.
fn clamp_corrected_mean(target: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    if sigma <= 0.0 || hi <= lo || (target - lo).min(hi - target) > 8.0 * sigma {
        return target;
    }
    let mut mu = target;
    for _ in 0..8 {
        let (a, b) = ((lo - mu) / sigma, (hi - mu) / sigma);
        let (ca, cb) = (phi_cdf(a), phi_cdf(b));
        let mean = lo * ca + hi * (1.0 - cb) + mu * (cb - ca) + sigma * (phi_pdf(a) - phi_pdf(b));
        let err = mean - target;
        if err.abs() < 1e-10 * target.max(1.0) {
            break;
        }
        mu -= err / (cb - ca).max(1e-3);
    }
    mu
}

fn phi_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn phi_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::exact::binomial_pmf;
    use crate::counting::RandomStream;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn histogram(draws: usize, f: impl Fn(f64, f64) -> (i64, i64)) -> BTreeMap<(i64, i64), f64> {
        let s = RandomStream::new(7);
        let mut h = BTreeMap::new();
        for i in 0..draws as u64 {
            let key = f(s.uniform(&[i, 0]), s.uniform(&[i, 1]));
            *h.entry(key).or_insert(0.0) += 1.0 / draws as f64;
        }
        h
    }

    fn outcome_key(o: GatingOutcome) -> (i64, i64) {
        (o.n_pos.round() as i64, o.n_neg.round() as i64)
    }

    #[test]
    fn unit_trial_is_bernoulli() {
        let h = histogram(200_000, |a, b| outcome_key(dual_gated(1.0, 0.3, a, b)));
        assert_eq!(h.len(), 2);
        assert!((h[&(1, 0)] - 0.3).abs() < 0.005);
        assert!((h[&(0, 1)] - 0.7).abs() < 0.005);
    }

    #[test]
    fn two_trials_match_binomial() {
        let h = histogram(1_000_000, |a, b| outcome_key(dual_gated(2.0, 0.4, a, b)));
        let pmf = binomial_pmf(2, 0.4);
        let tv: f64 = (0..=2)
            .map(|k| (h.get(&(k as i64, 2 - k as i64)).copied().unwrap_or(0.0) - pmf[k]).abs())
            .sum::<f64>()
            * 0.5;
        assert!(tv < 0.003, "tv {tv}");
        assert!((pmf[2] - 0.16).abs() < 1e-12 && (pmf[0] - 0.36).abs() < 1e-12);
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn half_trial_outcomes() {
        let h = histogram(400_000, |a, b| outcome_key(dual_gated(0.5, 0.5, a, b)));
        assert_eq!(h.len(), 3);
        assert!((h[&(0, 0)] - 0.5).abs() < 0.005);
        assert!((h[&(1, 0)] - 0.25).abs() < 0.005);
        assert!((h[&(0, 1)] - 0.25).abs() < 0.005);
    }

    #[test]
    fn certain_success() {
        for (a, b) in [(0.0, 0.0), (0.5, 0.9), (0.999, 0.1)] {
            assert_eq!(dual_gated(7.0, 1.0, a, b), GatingOutcome { n_pos: 7.0, n_neg: 0.0 });
            assert_eq!(dual_gated(7.0, 0.0, a, b), GatingOutcome { n_pos: 0.0, n_neg: 7.0 });
        }
    }

    #[test]
    fn single_gate_edge_cases() {
        assert_eq!(single_gated(0.0, 0.4, 0.0, 0.5), 0.0);
        let s = RandomStream::new(3);
        let draws = 1_000_000u64;
        let mut mean = 0.0;
        for i in 0..draws {
            let v = single_gated(0.5, 0.4, s.uniform(&[i, 0]), s.uniform(&[i, 1]));
            assert!(v == 0.0 || v == 1.0);
            mean += v;
        }
        mean /= draws as f64;
        assert!((mean - 0.2).abs() < 0.002, "{mean}");
    }

    #[test]
    fn single_gate_large_n() {
        let s = RandomStream::new(5);
        let draws = 20_000u64;
        let mut mean = 0.0;
        for i in 0..draws {
            let v = single_gated(1e6, 0.5, s.uniform(&[i, 0]), s.uniform(&[i, 1]));
            assert!((1.0..=1e6).contains(&v));
            mean += v / draws as f64;
        }
        assert!((mean - 5e5).abs() < 0.005 * 5e5);
    }

    proptest! {
        #[test]
        fn gaussian_branch_conserves_mass(n in 2.0f64..1e6, p in 0.001f64..0.999, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let o = dual_gated(n, p, a, b);
            prop_assert!(o.n_pos >= 0.0 && o.n_neg >= 0.0);
            if o.n_pos > 0.0 && o.n_neg > 0.0 {
                prop_assert_eq!(o.n_pos + o.n_neg, n);
                prop_assert!(o.n_pos >= 1.0 && o.n_pos <= n - 1.0);
            } else {
                prop_assert!(o.n_pos == n || o.n_neg == n);
            }
        }

        #[test]
        fn outcomes_are_non_negative(n in 0.0f64..4.0, p in 0.0f64..=1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let o = dual_gated(n, p, a, b);
            prop_assert!(o.n_pos >= 0.0 && o.n_neg >= 0.0);
            prop_assert!(o.n_pos <= n.max(2.0) && o.n_neg <= n.max(2.0));
        }
    }
}
