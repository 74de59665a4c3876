//! Exact samplers and probability mass functions used as oracles.

use super::RandomStream;

/// Binomial(N, p) by `N` independent Bernoulli draws from `stream`.
///
/// Cost is linear in `N`; intended for validation, not shading.
pub fn sample_binomial_exact(n: u64, p: f64, stream: &RandomStream, base: u64) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    (0..n).filter(|&j| stream.uniform(&[base, j]) < p).count() as u64
}

/// Exact multinomial by sequential conditional binomials over `probs`
/// (which must sum to 1).
pub fn sample_multinomial_exact(n: u64, probs: &[f64], stream: &RandomStream, base: u64) -> Vec<u64> {
    let mut out = vec![0; probs.len()];
    let mut remaining = n;
    let mut mass_left = 1.0f64;
    for (k, &pk) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() || mass_left <= pk {
            out[k] = remaining;
            break;
        }
        let cond = (pk / mass_left).clamp(0.0, 1.0);
        let draw = sample_binomial_exact(remaining, cond, stream, base.wrapping_mul(31).wrapping_add(k as u64));
        out[k] = draw;
        remaining -= draw;
        mass_left -= pk;
    }
    out
}

/// Probability mass function of Binomial(N, p) for `k = 0..=N`.
pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let n_us = n as usize;
    let mut pmf = vec![0.0; n_us + 1];
    if p <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if p >= 1.0 {
        pmf[n_us] = 1.0;
        return pmf;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut log_term = n as f64 * lq;
    for (k, slot) in pmf.iter_mut().enumerate() {
        *slot = log_term.exp();
        if k < n_us {
            log_term += ((n_us - k) as f64).ln() - ((k + 1) as f64).ln() + lp - lq;
        }
    }
    pmf
}

/// Total-variation distance between two mass functions on the same support.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    0.5 * (0..len)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        let s = RandomStream::new(1);
        assert_eq!(sample_binomial_exact(0, 0.4, &s, 0), 0);
        assert_eq!(sample_binomial_exact(12, 1.0, &s, 0), 12);
        assert_eq!(sample_binomial_exact(12, 0.0, &s, 0), 0);
    }

    #[test]
    fn pmf_sums_to_one_and_matches_closed_form() {
        let pmf = binomial_pmf(5, 0.3);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // C(5,2)·0.3²·0.7³
        assert!((pmf[2] - 10.0 * 0.09 * 0.343).abs() < 1e-12);
    }

    #[test]
    fn empirical_pmf_small_case() {
        let s = RandomStream::new(11);
        let draws = 1_000_000u64;
        let mut hist = vec![0.0; 6];
        for i in 0..draws {
            hist[sample_binomial_exact(5, 0.3, &s, i) as usize] += 1.0 / draws as f64;
        }
        let tv = total_variation(&hist, &binomial_pmf(5, 0.3));
        assert!(tv < 0.002, "tv {tv}");
    }

    #[test]
    fn multinomial_oracle_conserves() {
        let s = RandomStream::new(2);
        for i in 0..1000 {
            let c = sample_multinomial_exact(17, &[0.1, 0.2, 0.3, 0.4], &s, i);
            assert_eq!(c.iter().sum::<u64>(), 17);
        }
    }
}
