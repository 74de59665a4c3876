// Rendering from an INI configuration with an environment-variable style
// override layered on top, as the `render` command does.

use glint_ibl::commands::{load_tables, render_command, RenderOutput};
use glint_ibl::config::{RawConfig, RenderConfig};

const CONFIG: &str = "
[scene]
width = 64
height = 64
uv_scale = 0.5

[material]
sqrt_alpha = 0.3
f0 = 0.95, 0.64, 0.54
density_scale = e^-1

[envmap]
path = builtin:three_region
levels = 6
base_height = 32
samples = 128

[mode]
type = glint

[output]
formats = png, pfm
";

pub fn run_example() -> (RenderConfig, RenderOutput) {
    let dir = std::env::temp_dir().join("glint-ibl-examples");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let mut raw = RawConfig::default();
    raw.merge_ini_str(CONFIG).expect("config");
    raw.merge_env([("GLINT_IBL_SEED_VALUE".to_string(), "1234".to_string())]);
    raw.set("output.path", dir.join("config_render").display().to_string()).expect("key");
    let cfg = raw.resolve().expect("resolve");
    let tables = load_tables(Some(&dir.join("albedo.gibl"))).expect("tables");
    let out = render_command(&cfg, &tables).expect("render");
    (cfg, out)
}

#[allow(dead_code)]
fn main() {
    let (cfg, out) = run_example();
    println!("seed {} mode {}", cfg.seed, cfg.mode.name());
    for f in &out.files {
        println!("wrote {}", f.display());
    }
}
