// Footprints, grid vertices and the aggregated glint modulation.
//
// A pixel footprint is spread over six lattice vertices on two LODs; each
// vertex draws a multinomial over the radiance levels and the weighted sum,
// divided by its expectation, modulates smooth shading.

use glint_ibl::brdf::SurfaceMaterial;
use glint_ibl::counting::RandomStream;
use glint_ibl::grid::{aggregate_modulation, grid_vertices, Footprint, GridVertexDraw};
use glint_ibl::math::Rgb;

pub struct GridSummary {
    pub footprint: Footprint,
    pub vertices: [GridVertexDraw; 6],
    pub expected_count: f64,
    pub first_modulations: Vec<f64>,
    pub mean_modulation: f64,
}

pub fn run_example() -> GridSummary {
    let material = SurfaceMaterial::from_sqrt_alpha(0.4, Rgb::WHITE, 14.0, 1.0).expect("material");
    let footprint = Footprint::from_derivatives([0.3141, 0.2718], [2e-3, 5e-4], [-4e-4, 1.5e-3]);
    let vertices = grid_vertices(&footprint, &material);
    let expected_count = footprint.expected_count(&material);

    // Two reflecting levels (L = 1, 2) with probabilities 0.2 and 0.3.
    let levels = [1.0, 2.0];
    let probs = [0.2, 0.3, 0.5];
    let seeds = 20_000u64;
    let modulations: Vec<f64> = (0..seeds)
        .map(|s| aggregate_modulation(&vertices, &levels, &probs, expected_count, &RandomStream::new(s)))
        .collect();
    GridSummary {
        footprint,
        vertices,
        expected_count,
        first_modulations: modulations[..8].to_vec(),
        mean_modulation: modulations.iter().sum::<f64>() / seeds as f64,
    }
}

#[allow(dead_code)]
fn main() {
    let s = run_example();
    let f = &s.footprint;
    println!(
        "footprint major {:.3e} minor {:.3e} area {:.3e} anisotropy {:.2}",
        f.major_len,
        f.minor_len,
        f.area,
        f.anisotropy()
    );
    println!("expected microfacets in footprint {:.3}", s.expected_count);
    for v in &s.vertices {
        println!("  vertex seed {:016x} weight {:.4} count {:.3}", v.seed, v.weight, v.count);
    }
    println!("modulation for seeds 0..8: {:?}", s.first_modulations.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>());
    println!("mean modulation over 20000 seeds: {:.4}", s.mean_modulation);
}
