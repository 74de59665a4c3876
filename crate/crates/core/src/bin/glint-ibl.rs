use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, Args, Command, FromArgMatches, Parser, Subcommand};

use glint_ibl::commands::{load_tables, prefilter_command, render_command, PrefilterRequest};
use glint_ibl::config::{EnvSource, RawConfig, KEYS};
use glint_ibl::envmap::{PrefilterOptions, WeightSpace};
use glint_ibl::validate::{
    compare_files, counting_report, furnace_report, pow_report, FurnaceOptions, SphereSetup, ValidationReport,
    DEFAULT_UV_SCALE,
};

#[derive(Parser)]
#[command(name = "glint-ibl", version, about = "Glint image-based lighting renderer and validators")]
struct Cli {
    /// Global seed.
    #[arg(long, global = true, env = "GLINT_IBL_SEED")]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "GLINT_IBL_THREADS", default_value_t = 0)]
    threads: usize,
    /// INI configuration file for `render`.
    #[arg(long, global = true, env = "GLINT_IBL_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute radiance levels and write a prefiltered cache.
    Prefilter {
        /// Environment file, or builtin:white / builtin:three_region.
        #[arg(long)]
        env: String,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long, default_value_t = 1e-3)]
        clip_floor: f64,
        #[arg(long, default_value = "linear")]
        space: WeightSpace,
        #[arg(long, default_value_t = 128)]
        base_height: usize,
        #[arg(long, default_value_t = 1024)]
        samples: u32,
        #[arg(long)]
        quantize: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a scene described by --config and per-key flags.
    Render(RenderFlags),
    /// Statistical checks of the counting samplers.
    ValidateCounting {
        #[arg(long, default_value_t = 1_000_000)]
        draws: u64,
    },
    /// 32-bit (1-p)^N accuracy against an arbitrary-precision oracle.
    ValidatePow {
        /// Directory for the error-map PFMs.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// White-furnace convergence of glint shading.
    Furnace {
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        #[arg(long, default_value_t = 0.4)]
        sqrt_alpha: f64,
        /// Natural-log densities ln(rho).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-2,0,2")]
        log_densities: Vec<f64>,
        #[arg(long, default_value_t = 1024)]
        realizations: u64,
        #[arg(long, default_value_t = 14.0)]
        log_n0: f64,
        #[arg(long, default_value_t = DEFAULT_UV_SCALE)]
        uv_scale: f64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Mean relative luminance error between two PFM images.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
        #[arg(long, default_value_t = 0.01)]
        floor: f64,
    },
}

/// One `--<section>-<key>` flag per configuration key.
struct RenderFlags {
    values: Vec<(String, String)>,
}

impl FromArgMatches for RenderFlags {
    fn from_arg_matches(m: &ArgMatches) -> Result<Self, clap::Error> {
        let values = KEYS
            .iter()
            .filter_map(|k| m.get_one::<String>(&k.flag()).map(|v| (k.name(), v.clone())))
            .collect();
        Ok(Self { values })
    }

    fn update_from_arg_matches(&mut self, m: &ArgMatches) -> Result<(), clap::Error> {
        *self = Self::from_arg_matches(m)?;
        Ok(())
    }
}

impl Args for RenderFlags {
    fn augment_args(mut cmd: Command) -> Command {
        for k in KEYS {
            cmd = cmd.arg(
                clap::Arg::new(k.flag())
                    .long(k.flag())
                    .value_name("VALUE")
                    .allow_hyphen_values(true)
                    .help(format!("{} [default: {}]", k.help, k.default)),
            );
        }
        cmd
    }

    fn augment_args_for_update(cmd: Command) -> Command {
        Self::augment_args(cmd)
    }
}

fn report(r: &ValidationReport) -> ExitCode {
    print!("{r}");
    ExitCode::from(r.exit_code() as u8)
}

fn run(cli: Cli) -> glint_ibl::Result<ExitCode> {
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Cmd::Prefilter {
            env,
            levels,
            clip_floor,
            space,
            base_height,
            samples,
            quantize,
            out,
        } => {
            let env = match env.as_str() {
                "builtin:white" => EnvSource::White,
                "builtin:three_region" => EnvSource::ThreeRegion,
                path => EnvSource::File(path.into()),
            };
            let req = PrefilterRequest {
                env,
                levels,
                clip_floor,
                space,
                options: PrefilterOptions {
                    base_height,
                    samples_per_texel: samples,
                    quantize_weights: quantize,
                    ..Default::default()
                },
                out: Some(out.clone()),
            };
            let (_, text) = prefilter_command(&req)?;
            print!("{text}");
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Render(flags) => {
            let mut raw = RawConfig::default();
            if let Some(path) = &cli.config {
                raw.merge_file(path)?;
            }
            raw.merge_env(std::env::vars());
            if let Some(s) = cli.seed {
                raw.set("seed.value", s.to_string())?;
            }
            for (name, value) in flags.values {
                raw.set(&name, value)?;
            }
            let cfg = raw.resolve()?;
            print!("{}", raw.to_ini_string());
            let tables = load_tables(cfg.tables.as_deref())?;
            let out = render_command(&cfg, &tables)?;
            println!("# max expected microfacets per pixel {:.3e}", out.max_expected_count);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ValidateCounting { draws } => Ok(report(&counting_report(draws, seed)?)),
        Cmd::ValidatePow { out_dir } => {
            if let Some(dir) = &out_dir {
                std::fs::create_dir_all(dir).map_err(|e| glint_ibl::Error::Io {
                    path: dir.clone(),
                    source: e,
                })?;
            }
            Ok(report(&pow_report(out_dir.as_deref())?.0))
        }
        Cmd::Furnace {
            resolution,
            sqrt_alpha,
            log_densities,
            realizations,
            log_n0,
            uv_scale,
            out_dir,
        } => {
            if let Some(dir) = &out_dir {
                std::fs::create_dir_all(dir).map_err(|e| glint_ibl::Error::Io {
                    path: dir.clone(),
                    source: e,
                })?;
            }
            let opts = FurnaceOptions {
                setup: SphereSetup {
                    resolution,
                    sqrt_alpha,
                    log_n0,
                    uv_scale,
                    ..Default::default()
                },
                log_densities,
                realizations,
                seed,
                ..Default::default()
            };
            let tables = load_tables(None)?;
            Ok(report(&furnace_report(&opts, &tables, out_dir.as_deref())?))
        }
        Cmd::Compare { a, b, threshold, floor } => Ok(report(&compare_files(&a, &b, threshold, floor)?)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
