//! `burstsynth`: command-line front-end of the burst synthesis engine.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 I/O error.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod synthesize;

use std::path::PathBuf;
use std::process::ExitCode;

use burstsynth::synth::Variant;
use burstsynth::CfaPattern;
use clap::{Args, Parser, Subcommand};

use crate::commands::{DownsampleMethod, MetricMode, MotionSource};
use crate::config::{Overrides, PipelineConfig};
use crate::error::CliResult;

#[derive(Parser, Debug)]
#[command(
    name = "burstsynth",
    version,
    about = "Aligned LR-HR RAW burst synthesis"
)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug). RUST_LOG takes precedence.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fuse exp_*.raw16 captures of each scene into gt.rgb16.
    FuseGt {
        /// Scene directory; repeatable.
        #[arg(long = "scene")]
        scenes: Vec<PathBuf>,
        /// Process every scene under this directory.
        #[arg(long)]
        inputs: Option<PathBuf>,
        /// Output file (single scene only); defaults to <scene>/gt.rgb16.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a dataset of LR bursts and HR ground truth.
    Synthesize(SynthesizeArgs),
    /// Draw burst motions from a motion dataset or the uniform model.
    SampleMotion {
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Use uniform translation/rotation instead of a dataset.
        #[arg(long)]
        uniform: bool,
        #[arg(long, default_value_t = 8)]
        frames: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Uniform translation bound, pixels.
        #[arg(long, default_value_t = 24.0)]
        max_translation: f64,
        /// Uniform rotation bound, radians.
        #[arg(long, default_value_t = 0.017453292519943295)]
        max_rotation: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate a homography from a JSON list of [[x, y], [x', y']] pairs.
    EstimateH {
        #[arg(long)]
        correspondences: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trajectory statistics over one or more motion dataset files.
    StatsMotion {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Demosaic a RAW16 mosaic into an RGB16 image.
    Demosaic {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample an RGB16 image through a CFA into a RAW16 mosaic.
    Mosaic {
        #[arg(long)]
        input: PathBuf,
        /// CFA layout; defaults to the sidecar's, then RGGB.
        #[arg(long)]
        cfa: Option<CfaPattern>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Halve an RGB16 image.
    Downsample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "nearest")]
        method: DownsampleMethod,
        #[arg(long)]
        out: PathBuf,
    },
    /// PSNR, SSIM and MS-SSIM over reference/test RGB16 pairs.
    Metrics {
        /// Reference and test image; repeatable.
        #[arg(long = "pair", num_args = 2, value_names = ["REFERENCE", "TEST"])]
        pairs: Vec<PathBuf>,
        /// JSON list of [reference, test] paths.
        #[arg(long)]
        pairs_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "luma")]
        mode: MetricMode,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SynthesizeArgs {
    /// Pipeline config JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    inputs: Option<PathBuf>,
    #[arg(long)]
    motion: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    frames: Option<usize>,
    /// HR patch size; 0 keeps whole scenes.
    #[arg(long)]
    patch_size: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    motion_scale: Option<f64>,
    #[arg(long)]
    max_translation: Option<f64>,
    #[arg(long)]
    max_rotation: Option<f64>,
    /// Shot gain, fixed or as a LOW HIGH log-uniform range.
    #[arg(long, num_args = 1..=2)]
    shot_gain: Option<Vec<f64>>,
    /// Read noise sigma, fixed or as a LOW HIGH log-uniform range.
    #[arg(long, num_args = 1..=2)]
    read_sigma: Option<Vec<f64>>,
}

fn range(v: Option<Vec<f64>>) -> Option<[f64; 2]> {
    v.map(|v| [v[0], *v.last().unwrap()])
}

fn synthesize(args: SynthesizeArgs) -> CliResult<()> {
    let mut cfg = match &args.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    cfg.apply(Overrides {
        inputs: args.inputs,
        motion_dataset: args.motion,
        output: args.output,
        variant: args.variant,
        frames: args.frames,
        patch_size: args.patch_size,
        stride: args.stride,
        seed: args.seed,
        workers: args.workers,
        motion_scale: args.motion_scale,
        max_translation: args.max_translation,
        max_rotation: args.max_rotation,
        shot_gain: range(args.shot_gain),
        read_sigma: range(args.read_sigma),
    });
    let manifest = synthesize::run(&cfg)?;
    log::info!(
        "wrote {} sample(s) to {}",
        manifest.samples.len(),
        cfg.output
            .as_deref()
            .unwrap_or_else(|| std::path::Path::new(""))
            .display()
    );
    Ok(())
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::FuseGt {
            scenes,
            inputs,
            out,
        } => commands::fuse_gt(&scenes, inputs.as_deref(), out.as_deref()),
        Command::Synthesize(args) => synthesize(args),
        Command::SampleMotion {
            dataset,
            uniform,
            frames,
            count,
            seed,
            max_translation,
            max_rotation,
            out,
        } => {
            let source = MotionSource {
                dataset,
                uniform,
                max_translation,
                max_rotation,
            };
            commands::sample_motion(&source, frames, count, seed, out.as_deref())
        }
        Command::EstimateH {
            correspondences,
            out,
        } => commands::estimate_h(&correspondences, out.as_deref()),
        Command::StatsMotion { files, out } => commands::stats_motion(&files, out.as_deref()),
        Command::Demosaic { input, out } => commands::demosaic(&input, &out),
        Command::Mosaic { input, cfa, out } => commands::mosaic_file(&input, cfa, &out),
        Command::Downsample { input, method, out } => commands::downsample(&input, method, &out),
        Command::Metrics {
            pairs,
            pairs_file,
            mode,
            workers,
            out,
        } => commands::metrics(&pairs, pairs_file.as_deref(), mode, workers, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
