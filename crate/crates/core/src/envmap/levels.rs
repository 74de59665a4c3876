use crate::error::{Error, Result};

use super::EnvironmentMap;

/// Space in which fuzzy weights interpolate between adjacent levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightSpace {
    #[default]
    Linear,
    Log,
}

impl std::str::FromStr for WeightSpace {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Self::Linear),
            "log" => Ok(Self::Log),
            _ => Err(format!("expected `linear` or `log`, got `{s}`")),
        }
    }
}

impl std::fmt::Display for WeightSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Log => "log",
        })
    }
}

/// `K` luminance levels, `L_1 = 0`, log-spaced above the clip floor.
#[derive(Debug, Clone, PartialEq)]
pub struct RadianceLevels {
    levels: Vec<f64>,
    clip_floor: f64,
    space: WeightSpace,
    degenerate: bool,
}

pub fn compute_levels(env: &EnvironmentMap, k: usize, clip_floor: f64, space: WeightSpace) -> Result<RadianceLevels> {
    let (lo, hi) = env
        .luminances()
        .filter(|l| l.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), l| (a.min(l), b.max(l)));
    if !hi.is_finite() {
        return Err(Error::InvalidTexel { x: 0, y: 0 });
    }
    RadianceLevels::from_range(k, lo, hi, clip_floor, space)
}

impl RadianceLevels {
    /// Levels for luminances spanning `[min_lum, max_lum]`.
    pub fn from_range(k: usize, min_lum: f64, max_lum: f64, clip_floor: f64, space: WeightSpace) -> Result<Self> {
        if !(2..=16).contains(&k) {
            return Err(Error::config("envmap.levels", "K must be in 2..=16"));
        }
        if !(clip_floor > 0.0 && clip_floor.is_finite()) {
            return Err(Error::config("envmap.clip_floor", "must be positive"));
        }
        let m = min_lum.max(clip_floor);
        let mut levels = vec![0.0; k];
        let degenerate = max_lum <= m;
        if degenerate {
            levels[1..].fill(max_lum.max(clip_floor));
        } else {
            let (a, b) = (m.ln(), max_lum.ln());
            for (i, l) in levels.iter_mut().enumerate().skip(1) {
                let t = i as f64 / (k - 1) as f64;
                *l = (a + (b - a) * t).exp();
            }
            levels[k - 1] = max_lum;
        }
        Ok(Self { levels, clip_floor, space, degenerate })
    }

    /// Rebuild from stored values.
    pub fn from_parts(levels: Vec<f64>, clip_floor: f64, space: WeightSpace, degenerate: bool) -> Result<Self> {
        let ok = levels.len() >= 2
            && levels[0] == 0.0
            && levels.windows(2).all(|w| w[1] >= w[0])
            && levels.iter().all(|l| l.is_finite());
        if !ok || !(clip_floor > 0.0) {
            return Err(Error::CacheMismatch("GIBP"));
        }
        Ok(Self { levels, clip_floor, space, degenerate })
    }

    pub fn k(&self) -> usize {
        self.levels.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.levels
    }

    pub fn clip_floor(&self) -> f64 {
        self.clip_floor
    }

    pub fn space(&self) -> WeightSpace {
        self.space
    }

    /// True when the input had no luminance range above the clip floor
    /// (constant, dim or black); every lit texel then maps to level `K`.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Number of distinct levels.
    pub fn effective_count(&self) -> usize {
        1 + self.levels.windows(2).filter(|w| w[1] > w[0]).count()
    }
}

/// Fuzzy indicator weights of `lum`; see [`fuzzy_weights_into`].
pub fn fuzzy_weights(lum: f64, levels: &RadianceLevels) -> Vec<f64> {
    let mut w = vec![0.0; levels.k()];
    fuzzy_weights_into(lum, levels, &mut w);
    w
}

/// Weights of the two levels bracketing `lum`, summing to one.
///
/// Runs of equal levels route their weight to the highest index. For
/// degenerate ladders every positive luminance maps to level `K`.
pub fn fuzzy_weights_into(lum: f64, levels: &RadianceLevels, out: &mut [f64]) {
    let l = &levels.levels;
    let k = l.len();
    out[..k].fill(0.0);
    let lum = lum.max(0.0);
    if lum >= l[k - 1] || (levels.is_degenerate() && lum > 0.0) {
        out[k - 1] = 1.0;
        return;
    }
    let j = l.partition_point(|&x| x <= lum) - 1;
    let next = l.partition_point(|&x| x <= l[j + 1]) - 1;
    let t = match levels.space {
        WeightSpace::Linear => (lum - l[j]) / (l[next] - l[j]),
        WeightSpace::Log => {
            let lo = if j == 0 { levels.clip_floor.min(l[next]) } else { l[j] };
            if lum <= lo {
                0.0
            } else {
                ((lum.ln() - lo.ln()) / (l[next].ln() - lo.ln())).clamp(0.0, 1.0)
            }
        }
    };
    out[j] = 1.0 - t;
    out[next] += t;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Rgb;
    use proptest::prelude::*;

    fn grey_env(lums: &[f64]) -> EnvironmentMap {
        let h = 1;
        let w = 2;
        assert_eq!(lums.len(), 2);
        let texels = lums.iter().flat_map(|&l| [l as f32; 3]).collect();
        EnvironmentMap::from_texels(w, h, texels).unwrap()
    }

    #[test]
    fn log_spaced_levels() {
        let env = grey_env(&[(-5.0f64).exp(), 5.0f64.exp()]);
        let lv = compute_levels(&env, 4, 1e-3, WeightSpace::Linear).unwrap();
        let want = [0.0, (-5.0f64 / 3.0).exp(), (5.0f64 / 3.0).exp(), 5.0f64.exp()];
        for (a, b) in lv.values().iter().zip(want) {
            assert!((a - b).abs() <= 1e-5 * b.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn degenerate_and_two_level_ladders() {
        let env = EnvironmentMap::constant(4, Rgb::WHITE);
        let lv = compute_levels(&env, 4, 1e-3, WeightSpace::Linear).unwrap();
        assert_eq!(lv.values(), &[0.0, 1.0, 1.0, 1.0]);
        assert_eq!(lv.effective_count(), 2);
        assert_eq!(fuzzy_weights(1.0, &lv), vec![0.0, 0.0, 0.0, 1.0]);

        let black = EnvironmentMap::constant(4, Rgb::BLACK);
        let lv = compute_levels(&black, 4, 1e-3, WeightSpace::Linear).unwrap();
        assert_eq!(lv.values(), &[0.0, 1e-3, 1e-3, 1e-3]);
        assert_eq!(fuzzy_weights(0.0, &lv), vec![1.0, 0.0, 0.0, 0.0]);

        let dim = EnvironmentMap::constant(4, Rgb::splat(1e-4));
        let lv = compute_levels(&dim, 3, 1e-3, WeightSpace::Linear).unwrap();
        assert_eq!(fuzzy_weights(1e-4, &lv), vec![0.0, 0.0, 1.0]);

        let env = grey_env(&[0.2, 7.5]);
        let lv = compute_levels(&env, 2, 1e-3, WeightSpace::Linear).unwrap();
        assert_eq!(lv.values().len(), 2);
        assert_eq!(lv.values()[0], 0.0);
        assert!((lv.values()[1] - 7.5).abs() < 1e-5);
    }

    #[test]
    fn weight_examples() {
        let lv = RadianceLevels::from_parts(vec![0.0, 2.0], 1e-3, WeightSpace::Linear, false).unwrap();
        assert_eq!(fuzzy_weights(0.5, &lv), vec![0.75, 0.25]);
        assert_eq!(fuzzy_weights(3.0, &lv), vec![0.0, 1.0]);
        let lv = RadianceLevels::from_parts(vec![0.0, 0.5, 1.0, 4.0], 1e-3, WeightSpace::Linear, false).unwrap();
        assert_eq!(fuzzy_weights(1.0, &lv), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(fuzzy_weights(0.5, &lv), vec![0.0, 1.0, 0.0, 0.0]);
        let log = RadianceLevels::from_parts(vec![0.0, 0.01, 1.0], 1e-4, WeightSpace::Log, false).unwrap();
        let w = fuzzy_weights(0.1, &log);
        assert!((w[2] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
        let w = fuzzy_weights(1e-3, &log);
        assert!((w[1] - 0.5).abs() < 1e-12 && (w[0] - 0.5).abs() < 1e-12);
        assert_eq!(fuzzy_weights(0.0, &log)[0], 1.0);
    }

    #[test]
    fn config_errors_name_keys() {
        let env = EnvironmentMap::constant(2, Rgb::WHITE);
        let e = compute_levels(&env, 1, 1e-3, WeightSpace::Linear).unwrap_err();
        assert!(e.to_string().contains("envmap.levels"));
        let e = compute_levels(&env, 4, 0.0, WeightSpace::Linear).unwrap_err();
        assert!(e.to_string().contains("envmap.clip_floor"));
    }

    proptest! {
        #[test]
        fn partition_reconstruction_and_support(
            lo in 1e-6f64..1.0, span in 1.0f64..1e4, k in 2usize..=16, t in 0.0f64..1.2, log in proptest::bool::ANY,
        ) {
            let space = if log { WeightSpace::Log } else { WeightSpace::Linear };
            let lv = RadianceLevels::from_range(k, lo, lo * span, 1e-3, space).unwrap();
            let lum = t * lo * span;
            let w = fuzzy_weights(lum, &lv);
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(w.iter().all(|x| (0.0..=1.0).contains(x)));
            let nonzero: Vec<usize> = (0..k).filter(|&i| w[i] > 0.0).collect();
            prop_assert!(nonzero.len() <= 2);
            if nonzero.len() == 2 {
                prop_assert_eq!(nonzero[1], nonzero[0] + 1);
                let l = lv.values();
                prop_assert!(l[nonzero[0]] <= lum && lum <= l[nonzero[1]]);
            }
            if !log && !lv.is_degenerate() {
                let recon: f64 = w.iter().zip(lv.values()).map(|(a, b)| a * b).sum();
                let clamped = lum.min(*lv.values().last().unwrap());
                prop_assert!((recon - clamped).abs() <= 1e-9 * clamped.max(1.0));
            }
        }
    }
}
