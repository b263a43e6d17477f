use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use execsim::config::{emit_config, parse_config, ExperimentPreset, RunConfig};
use execsim::experiments::run_experiment;

#[derive(Parser)]
#[command(
    name = "execsim",
    version,
    about = "Optimal-execution simulator: strategies, closed forms, Monte Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment preset and write its data files.
    Run {
        /// TOML config file; omitted keys fall back to the preset defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Preset name; overrides the config file's `preset` key.
        #[arg(long)]
        preset: Option<String>,
        /// Number of Monte Carlo paths per batch.
        #[arg(long)]
        paths: Option<usize>,
        /// Euler step size.
        #[arg(long)]
        dt: Option<f64>,
        /// Master seed; batches derive per-path streams from it.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads. Affects speed only, never results.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print (or write) the fully resolved TOML config for a preset.
    EmitConfig {
        #[arg(long, default_value = "baseline")]
        preset: String,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available experiment presets.
    ListPresets,
}

fn resolve_config(
    config: Option<PathBuf>,
    preset: Option<String>,
    paths: Option<usize>,
    dt: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<RunConfig> {
    let mut cfg = match &config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            parse_config(&text)?
        }
        None => RunConfig::preset_defaults(ExperimentPreset::Baseline),
    };
    if let Some(name) = preset {
        let preset = ExperimentPreset::parse(&name)?;
        if config.is_none() {
            // no file: start from the preset's own defaults
            cfg = RunConfig::preset_defaults(preset);
        } else {
            cfg.preset = preset;
        }
    }
    if let Some(n) = paths {
        cfg.n_paths = n;
    }
    if let Some(v) = dt {
        cfg.dt = v;
    }
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if let Some(dir) = out {
        cfg.out_dir = dir;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run {
            config,
            preset,
            paths,
            dt,
            seed,
            out,
            threads,
        } => {
            let cfg = resolve_config(config, preset, paths, dt, seed, out)?;
            let run = || -> Result<Vec<PathBuf>> { Ok(run_experiment(&cfg)?) };
            let written = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .context("building worker pool")?
                    .install(run)?,
                None => run()?,
            };
            for path in &written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::EmitConfig { preset, out } => {
            let preset = ExperimentPreset::parse(&preset)?;
            let text = emit_config(&RunConfig::preset_defaults(preset));
            match out {
                Some(path) => {
                    fs::write(&path, text)
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::ListPresets => {
            for p in ExperimentPreset::ALL {
                println!("{:<10} {}", p.name(), p.describe());
            }
            Ok(())
        }
    }
}
