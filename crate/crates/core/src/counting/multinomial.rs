//! Hierarchical multinomial sampling on a fixed balanced binary tree of bins.

use super::gating::dual_gated_matched;
use super::RandomStream;

/// Per-bin counts `M_1..M_K` followed by the dummy bin `M_∅`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinCountVector {
    pub counts: Vec<f64>,
}

impl BinCountVector {
    pub fn zeros(bins: usize) -> Self {
        Self {
            counts: vec![0.0; bins],
        }
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Counts of the real bins, without the dummy.
    pub fn levels(&self) -> &[f64] {
        &self.counts[..self.counts.len().saturating_sub(1)]
    }

    pub fn dummy(&self) -> f64 {
        self.counts.last().copied().unwrap_or(0.0)
    }
}

/// Draw bin counts for `n` trials over `probs` (K bins, dummy last).
///
/// Probabilities are renormalised to one, the dummy absorbing any deficit.
/// Each internal node of the tree splits its count with a moment-matched
/// dual-gated draw whose uniforms come from `(vertex, node, 0|1|2)`; subtrees
/// without mass receive nothing and consume no randomness. Integral counts
/// stay integral.
pub fn sample_multinomial(n: f64, probs: &[f64], stream: &RandomStream, vertex: u64) -> BinCountVector {
    let bins = probs.len();
    let mut out = BinCountVector::zeros(bins);
    if bins == 0 || !(n > 0.0) {
        return out;
    }
    let mut masses: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
    let sum: f64 = masses.iter().sum();
    if sum < 1.0 {
        masses[bins - 1] += 1.0 - sum;
    }
    let mut prefix = Vec::with_capacity(bins + 1);
    prefix.push(0.0);
    for m in &masses {
        prefix.push(prefix.last().unwrap() + m);
    }
    split(n, 0, bins, 1, &prefix, stream, vertex, &mut out.counts);
    out
}

#[allow(clippy::too_many_arguments)]
fn split(count: f64, lo: usize, hi: usize, node: u64, prefix: &[f64], stream: &RandomStream, vertex: u64, out: &mut [f64]) {
    if count <= 0.0 {
        return;
    }
    if hi - lo == 1 {
        out[lo] = count;
        return;
    }
    let mid = (lo + hi).div_ceil(2);
    let left = prefix[mid] - prefix[lo];
    let right = prefix[hi] - prefix[mid];
    let (to_left, to_right) = if right <= 0.0 {
        (count, 0.0)
    } else if left <= 0.0 {
        (0.0, count)
    } else {
        let p = left / (left + right);
        let xi1 = stream.uniform(&[vertex, node, 0]);
        let xi2 = stream.uniform(&[vertex, node, 1]);
        let dither = (count.fract() == 0.0).then(|| stream.uniform(&[vertex, node, 2]));
        let o = dual_gated_matched(count, p, xi1, xi2, dither);
        (o.n_pos, o.n_neg)
    };
    split(to_left, lo, mid, 2 * node, prefix, stream, vertex, out);
    split(to_right, mid, hi, 2 * node + 1, prefix, stream, vertex, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::exact::{binomial_pmf, total_variation};
    use proptest::prelude::*;

    #[test]
    fn zero_trials() {
        let s = RandomStream::new(1);
        let m = sample_multinomial(0.0, &[0.2, 0.3, 0.5], &s, 9);
        assert_eq!(m.counts, vec![0.0; 3]);
    }

    #[test]
    fn one_hot_is_deterministic() {
        let s = RandomStream::new(1);
        for v in 0..100 {
            let m = sample_multinomial(5.0, &[0.0, 1.0, 0.0, 0.0], &s, v);
            assert_eq!(m.counts, vec![0.0, 5.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn dummy_absorbs_deficit() {
        let s = RandomStream::new(4);
        let m = sample_multinomial(3.0, &[0.0, 0.0, 0.0], &s, 0);
        assert_eq!(m.counts, vec![0.0, 0.0, 3.0]);
    }

    #[test]
    fn means_and_marginals() {
        let probs = [0.2, 0.3, 0.1, 0.4];
        let n = 50u64;
        let draws = 100_000u64;
        let s = RandomStream::new(99);
        let mut means = [0.0; 4];
        let mut hist = vec![vec![0.0; n as usize + 1]; 4];
        for v in 0..draws {
            let m = sample_multinomial(n as f64, &probs, &s, v);
            for k in 0..4 {
                means[k] += m.counts[k] / draws as f64;
                hist[k][m.counts[k] as usize] += 1.0 / draws as f64;
            }
        }
        for k in 0..4 {
            let expected = n as f64 * probs[k];
            assert!((means[k] - expected).abs() < 0.03 * expected, "bin {k}: {} vs {expected}", means[k]);
            let exact = binomial_pmf(n, probs[k]);
            let tv = total_variation(&hist[k], &exact);
            // Bins where no discretised normal reaches 0.02 must still beat the best one.
            let bound = 0.02f64.max(normal_approximation_tv(n, probs[k]));
            assert!(tv < bound, "bin {k}: tv {tv} bound {bound}");
        }
    }

    fn normal_approximation_tv(n: u64, p: f64) -> f64 {
        let (mu, sd) = (n as f64 * p, (n as f64 * p * (1.0 - p)).sqrt());
        let cdf = |x: f64| 0.5 * statrs::function::erf::erfc(-(x - mu) / (sd * std::f64::consts::SQRT_2));
        let approx: Vec<f64> = (0..=n)
            .map(|k| {
                let lo = if k == 0 { 0.0 } else { cdf(k as f64 - 0.5) };
                let hi = if k == n { 1.0 } else { cdf(k as f64 + 0.5) };
                hi - lo
            })
            .collect();
        total_variation(&approx, &binomial_pmf(n, p))
    }

    proptest! {
        #[test]
        fn integral_trials_are_conserved(n in 2u32..500, raw in proptest::collection::vec(0.0f64..1.0, 2..9), v in 0u64..1_000_000) {
            let sum: f64 = raw.iter().sum();
            prop_assume!(sum > 0.0);
            let probs: Vec<f64> = raw.iter().map(|x| x / sum).collect();
            let m = sample_multinomial(n as f64, &probs, &RandomStream::new(17), v);
            prop_assert_eq!(m.total(), n as f64);
            for c in &m.counts {
                prop_assert!(*c >= 0.0 && c.fract() == 0.0);
            }
        }
    }
}
