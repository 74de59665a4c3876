// Radiance levels and fuzzy level weights.
//
// An environment whose luminance spans e^-5..e^5 is cut into K = 4 levels;
// each luminance is then expressed as a convex combination of two levels.

use glint_ibl::envmap::{compute_levels, fuzzy_weights, EnvironmentMap, RadianceLevels, WeightSpace};
use glint_ibl::math::{Rgb, Vec3};

pub struct LevelsSummary {
    pub levels: RadianceLevels,
    /// `(luminance, weights, Σ w_k L_k)` for a few probe values.
    pub probes: Vec<(f64, Vec<f64>, f64)>,
}

pub fn run_example() -> LevelsSummary {
    // Luminance e^(5·y): darkest at the nadir, brightest at the zenith.
    let env = EnvironmentMap::from_fn(64, |d: Vec3| {
        let l = (5.0 * d.y).exp();
        Rgb::splat(l)
    });
    let levels = compute_levels(&env, 4, 1e-3, WeightSpace::Linear).expect("levels");
    let probes = [0.0, 0.01, 0.5, 1.0, 3.0, 100.0]
        .into_iter()
        .map(|lum| {
            let w = fuzzy_weights(lum, &levels);
            let recon = w.iter().zip(levels.values()).map(|(w, l)| w * l).sum();
            (lum, w, recon)
        })
        .collect();
    LevelsSummary { levels, probes }
}

#[allow(dead_code)]
fn main() {
    let s = run_example();
    println!("levels {:?}", s.levels.values());
    for (lum, w, recon) in &s.probes {
        let w: Vec<String> = w.iter().map(|x| format!("{x:.3}")).collect();
        println!("lum {lum:>8.3} -> weights [{}] reconstructs {recon:.4}", w.join(", "));
    }
}
