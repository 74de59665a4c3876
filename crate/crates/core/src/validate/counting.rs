use crate::counting::{
    binomial_pmf, dual_gated, dual_gated_matched, sample_multinomial, single_gated, total_variation, RandomStream,
};
use crate::error::{Error, Result};

use super::report::{Bound, ReportLine, ValidationReport};

pub const MIN_DRAWS: u64 = 100_000;

const SMALL_N_PROBS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

fn stream(seed: u64, tag: u64) -> RandomStream {
    RandomStream::new(seed).fork(&[tag])
}

/// Dual-gated pmf against the exact binomial for `N ∈ {0, 1, 2}`.
pub fn small_n_exactness(draws: u64, seed: u64) -> Vec<ReportLine> {
    let s = stream(seed, 1);
    let mut out = Vec::new();
    for n in 0..=2u64 {
        for (pi, &p) in SMALL_N_PROBS.iter().enumerate() {
            // Last slot collects any outcome outside {0..N}.
            let mut hist = vec![0.0; n as usize + 2];
            for d in 0..draws {
                let c = [n, pi as u64, d];
                let o = dual_gated(n as f64, p, s.uniform(&[c[0], c[1], c[2], 0]), s.uniform(&[c[0], c[1], c[2], 1]));
                let valid = o.n_pos.fract() == 0.0 && o.n_pos >= 0.0 && o.n_pos <= n as f64 && o.n_pos + o.n_neg == n as f64;
                let slot = if valid { o.n_pos as usize } else { n as usize + 1 };
                hist[slot] += 1.0;
            }
            hist.iter_mut().for_each(|h| *h /= draws as f64);
            let mut exact = binomial_pmf(n, p);
            exact.push(0.0);
            out.push(ReportLine::new(
                format!("dual_gated_exact_n{n}_p{p}"),
                "tv",
                total_variation(&hist, &exact),
                Bound::AtMost,
                0.005,
            ));
        }
    }
    out
}

/// `min(N·p, 1 − (1 − p)^N)` selects `N·p` below one trial and the gate
/// probability above; counts violations beyond `1e-12`.
pub fn min_probability_identity(samples: u64, seed: u64) -> ReportLine {
    let s = stream(seed, 2);
    let mut violations = 0u64;
    for i in 0..samples {
        let n = 10f64.powf(-3.0 + 9.0 * s.uniform(&[i, 0]));
        let p = s.uniform(&[i, 1]).max(f64::MIN_POSITIVE);
        let np = n * p;
        let gate = 1.0 - (1.0 - p).powf(n);
        let chosen = np.min(gate);
        let expected = if n < 1.0 { np } else { gate };
        if (chosen - expected).abs() > 1e-12 {
            violations += 1;
        }
    }
    ReportLine::new("min_probability_identity", "violations", violations as f64, Bound::AtMost, 0.0)
}

/// Empirical `P(n = N)` and `P(n̄ = N)` as z-scores against `p^N`, `(1−p)^N`.
pub fn gate_probabilities(draws: u64, seed: u64) -> Vec<ReportLine> {
    let s = stream(seed, 3);
    let mut out = Vec::new();
    for n in [3u64, 10] {
        for p in [0.3f64, 0.7] {
            let (mut all_pos, mut all_neg) = (0u64, 0u64);
            for d in 0..draws {
                let o = dual_gated(n as f64, p, s.uniform(&[n, d, 0, p.to_bits()]), s.uniform(&[n, d, 1, p.to_bits()]));
                all_pos += (o.n_pos == n as f64) as u64;
                all_neg += (o.n_neg == n as f64) as u64;
            }
            for (label, hits, q) in [("pos", all_pos, p.powi(n as i32)), ("neg", all_neg, (1.0 - p).powi(n as i32))] {
                let sigma = (q * (1.0 - q) / draws as f64).sqrt();
                let z = (hits as f64 / draws as f64 - q).abs() / sigma;
                out.push(ReportLine::new(format!("gate_all_{label}_n{n}_p{p}"), "z_score", z, Bound::AtMost, 3.0));
            }
        }
    }
    out
}

/// Upper bound on the TV distance between `n(N, p)` and `n̄(N, 1−p)`: the
/// mismatch rate under the coupling `ξ ↦ 1 − ξ`.
pub fn dual_gated_symmetry(draws: u64, seed: u64) -> Vec<ReportLine> {
    let s = stream(seed, 4);
    let mut out = Vec::new();
    for n in [0.5f64, 1.5, 3.0, 10.0, 100.0] {
        for p in [0.1f64, 0.5] {
            let mut mismatches = 0u64;
            for d in 0..draws {
                let xi1 = s.uniform(&[n.to_bits(), p.to_bits(), d, 0]);
                let xi2 = s.uniform(&[n.to_bits(), p.to_bits(), d, 1]);
                let a = dual_gated(n, p, xi1, xi2);
                let b = dual_gated(n, 1.0 - p, 1.0 - xi1, 1.0 - xi2);
                if (a.n_pos - b.n_neg).abs() > 1e-6 * n.max(1.0) {
                    mismatches += 1;
                }
            }
            out.push(ReportLine::new(
                format!("dual_gated_symmetry_n{n}_p{p}"),
                "coupled_tv",
                mismatches as f64 / draws as f64,
                Bound::AtMost,
                0.005,
            ));
        }
    }
    out
}

fn binned(values: impl Iterator<Item = f64>, n: f64, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    let mut total = 0.0;
    for v in values {
        let b = ((v / n * bins as f64) as usize).min(bins - 1);
        h[b] += 1.0;
        total += 1.0;
    }
    h.iter_mut().for_each(|x| *x /= total);
    h
}

/// TV distance between single-gated `n(N, p)` and `N − n(N, 1−p)`.
pub fn single_gated_asymmetry(n: f64, p: f64, draws: u64, seed: u64) -> f64 {
    let s = stream(seed, 5);
    let bins = (4.0 * n).ceil().max(2.0) as usize;
    let fwd = binned(
        (0..draws).map(|d| single_gated(n, p, s.uniform(&[d, 0, 0]), s.uniform(&[d, 0, 1]))),
        n,
        bins,
    );
    let mirrored = binned(
        (0..draws).map(|d| n - single_gated(n, 1.0 - p, s.uniform(&[d, 1, 0]), s.uniform(&[d, 1, 1]))),
        n,
        bins,
    );
    total_variation(&fwd, &mirrored)
}

/// For `N ≥ 2`, every dual-gated outcome satisfies `n + n̄ = N` bit-exactly.
pub fn gating_conservation(samples: u64, seed: u64) -> ReportLine {
    let s = stream(seed, 6);
    let mut violations = 0u64;
    for i in 0..samples {
        let n = 2.0 + 998.0 * s.uniform(&[i, 0]);
        let p = s.uniform(&[i, 1]);
        let (x1, x2) = (s.uniform(&[i, 2]), s.uniform(&[i, 3]));
        for o in [dual_gated(n, p, x1, x2), dual_gated_matched(n, p, x1, x2, None)] {
            if o.n_pos + o.n_neg != n {
                violations += 1;
            }
        }
    }
    ReportLine::new("gating_conservation", "violations", violations as f64, Bound::AtMost, 0.0)
}

/// Random probability vectors over four levels plus the dummy bin.
pub fn random_probabilities(stream: &RandomStream, index: u64) -> Vec<f64> {
    let raw: Vec<f64> = (0..5).map(|k| 0.05 + stream.uniform(&[index, k])).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|r| r / sum).collect()
}

/// Conservation and per-bin means of the hierarchical multinomial.
pub fn multinomial_marginals(draws: u64, seed: u64) -> Vec<ReportLine> {
    let s = stream(seed, 7);
    let mut out = Vec::new();
    for (case, n) in [(0u64, 10u64), (1, 10), (2, 100), (3, 100)] {
        let probs = random_probabilities(&s.fork(&[0xb1]), case);
        let draw_stream = s.fork(&[case]);
        let mut means = vec![0.0; probs.len()];
        let mut violations = 0u64;
        for d in 0..draws {
            let m = sample_multinomial(n as f64, &probs, &draw_stream, d);
            if m.total() != n as f64 {
                violations += 1;
            }
            for (acc, c) in means.iter_mut().zip(&m.counts) {
                *acc += c / draws as f64;
            }
        }
        let worst = means
            .iter()
            .zip(&probs)
            .map(|(m, p)| (m - n as f64 * p).abs() / (n as f64 * p))
            .fold(0.0, f64::max);
        out.push(ReportLine::new(
            format!("multinomial_conservation_n{n}_case{case}"),
            "violations",
            violations as f64,
            Bound::AtMost,
            0.0,
        ));
        out.push(ReportLine::new(
            format!("multinomial_means_n{n}_case{case}"),
            "max_rel_err",
            worst,
            Bound::AtMost,
            0.03,
        ));
    }
    out
}

/// Text map of the relative mean error `|E[n] − N·p| / (N·p)` over
/// `p ∈ [0, 1]` (columns) and `log10 N ∈ [0, 2]` (rows) for one sampler.
pub fn gating_error_map(label: &str, draws: u64, seed: u64, sampler: impl Fn(f64, f64, f64, f64, f64) -> f64) -> String {
    let s = stream(seed, 8);
    let ps: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
    let mut text = format!("{label}: relative mean error, rows log10 N = 0.00..2.00, columns p = 0.05..0.95\n");
    for r in 0..=8 {
        let log_n = r as f64 * 0.25;
        let n = 10f64.powf(log_n);
        text.push_str(&format!("{log_n:5.2} |"));
        for (ci, &p) in ps.iter().enumerate() {
            let mean = (0..draws)
                .map(|d| {
                    let c = [r, ci as u64, d];
                    sampler(
                        n,
                        p,
                        s.uniform(&[c[0], c[1], c[2], 0]),
                        s.uniform(&[c[0], c[1], c[2], 1]),
                        s.uniform(&[c[0], c[1], c[2], 2]),
                    )
                })
                .sum::<f64>()
                / draws as f64;
            text.push_str(&format!(" {:6.3}", (mean - n * p).abs() / (n * p)));
        }
        text.push('\n');
    }
    text
}

/// Full counting validation at `draws` samples per test.
pub fn counting_report(draws: u64, seed: u64) -> Result<ValidationReport> {
    if draws < MIN_DRAWS {
        return Err(Error::config("draws", format!("must be at least {MIN_DRAWS}")));
    }
    let mut r = ValidationReport::new(format!("validate-counting draws={draws} seed={seed}"));
    r.header.push("symmetry lines bound the TV distance by the mismatch rate under the coupling xi -> 1 - xi".into());
    r.extend(small_n_exactness(draws, seed));
    r.push(min_probability_identity(draws, seed));
    r.extend(gate_probabilities(draws, seed));
    r.extend(dual_gated_symmetry(draws, seed));
    r.push(gating_conservation(draws, seed));
    for n in [1.5, 3.0] {
        let tv = single_gated_asymmetry(n, 0.3, draws, seed);
        r.push(ReportLine::new(format!("single_gated_asymmetry_n{n}_p0.3"), "tv", tv, Bound::Above, 0.005));
    }
    let tv1 = single_gated_asymmetry(1.0, 0.3, draws, seed);
    r.note(format!("single-gated at N=1 is a plain Bernoulli(p); mirrored tv {tv1:.4}"));
    r.extend(multinomial_marginals(draws, seed));
    let cell = (draws / 50).max(2_000);
    r.note(gating_error_map("single-gated", cell, seed, |n, p, a, b, _| single_gated(n, p, a, b)));
    r.note(gating_error_map("dual-gated", cell, seed, |n, p, a, b, _| dual_gated(n, p, a, b).n_pos));
    r.note(gating_error_map("dual-gated, moment-matched", cell, seed, |n, p, a, b, u| {
        let dither = (n.fract() == 0.0).then_some(u);
        dual_gated_matched(n, p, a, b, dither).n_pos
    }));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_draw_counts() {
        assert!(matches!(counting_report(10, 0), Err(Error::Config { .. })));
    }

    #[test]
    fn single_gated_is_symmetric_only_at_one_trial() {
        assert!(single_gated_asymmetry(1.0, 0.3, 20_000, 3) < 0.02);
        assert!(single_gated_asymmetry(3.0, 0.3, 20_000, 3) > 0.05);
    }

    #[test]
    fn identity_holds() {
        assert!(min_probability_identity(10_000, 5).passed());
    }

    #[test]
    fn symmetry_coupling_is_tight() {
        for l in dual_gated_symmetry(20_000, 1) {
            assert!(l.passed(), "{l}");
        }
    }
}
