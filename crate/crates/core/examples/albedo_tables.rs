// GGX albedo tables: total microfacet area, visible area and the split-sum
// Fresnel terms.

use glint_ibl::brdf::{AlbedoTables, TableResolution, DEFAULT_TABLE_SAMPLES};
use glint_ibl::render::UnprojectedGgx;

pub struct TableRow {
    pub sqrt_alpha: f64,
    pub cos_theta_o: f64,
    pub d_total: f64,
    pub d_total_closed_form: f64,
    pub d_visible: f64,
    pub scale: f64,
    pub bias: f64,
}

pub fn run_example() -> Vec<TableRow> {
    let tables = AlbedoTables::build(TableResolution::default(), DEFAULT_TABLE_SAMPLES).expect("tables");
    let mut rows = Vec::new();
    for sqrt_alpha in [0.2, 0.4, 0.7] {
        let alpha = sqrt_alpha * sqrt_alpha;
        for cos_theta_o in [1.0, 0.5, 0.1] {
            let (scale, bias) = tables.fresnel_split(cos_theta_o, alpha);
            rows.push(TableRow {
                sqrt_alpha,
                cos_theta_o,
                d_total: tables.d_total(alpha),
                d_total_closed_form: UnprojectedGgx::new(alpha).total_area(),
                d_visible: tables.d_visible(cos_theta_o, alpha),
                scale,
                bias,
            });
        }
    }
    rows
}

#[allow(dead_code)]
fn main() {
    println!("sqrt_a  cos_o   D_H     D_H*    E_D     scale   bias");
    for r in run_example() {
        println!(
            "{:.2}    {:.2}    {:.4}  {:.4}  {:.4}  {:.4}  {:.4}",
            r.sqrt_alpha, r.cos_theta_o, r.d_total, r.d_total_closed_form, r.d_visible, r.scale, r.bias
        );
    }
}
