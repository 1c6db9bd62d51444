//! Single-operation commands. Each delegates to one engine operation.

use std::path::{Path, PathBuf};

use burstsynth::demosaic::nn_demosaic;
use burstsynth::io::{
    quantize_rgb, read_bayer_frame, read_raw16, read_rgb16, rgb_from_samples, rgb_sidecar,
    write_bayer_frame, write_raw16,
};
use burstsynth::metrics::{evaluate_pair, MetricReport, SsimMode, SsimOptions};
use burstsynth::motion::{
    estimate_dlt, load_correspondences, sample_burst_motion, sample_uniform_motion,
    trajectory_stats, MotionDataset,
};
use burstsynth::raw::mosaic;
use burstsynth::resample::{bilinear_downsample_2x, nn_downsample_2x};
use burstsynth::synth::fuse_exposures;
use burstsynth::{CfaPattern, Error, Levels, RgbImage};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::synthesize::{discover_scenes, raw16_files, EXPOSURE_PREFIX, GT_FILE};

/// Write pretty JSON to `out`, or to stdout when absent.
pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON serialization") + "\n";
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Fuse `exp_*.raw16` captures of one scene into `gt.rgb16` (full 16-bit range).
pub fn fuse_scene(dir: &Path, out: Option<&Path>) -> CliResult<PathBuf> {
    let paths = raw16_files(dir, EXPOSURE_PREFIX)?;
    if paths.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no {EXPOSURE_PREFIX}*.raw16 captures in {}",
            dir.display()
        ))
        .into());
    }
    let mut frames = Vec::with_capacity(paths.len());
    let mut scales = Vec::with_capacity(paths.len());
    for path in &paths {
        let (frame, sidecar) = read_bayer_frame(path)?;
        let scale = sidecar.exposure_scale.ok_or_else(|| Error::Malformed {
            path: path.clone(),
            reason: "sidecar lacks exposure_scale".into(),
        })?;
        frames.push(nn_demosaic(&frame.normalize())?);
        scales.push(scale);
    }
    let gt = fuse_exposures(&frames, &scales)?;
    let target = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dir.join(GT_FILE));
    burstsynth::io::write_rgb16(&target, &gt, Levels::FULL)?;
    Ok(target)
}

pub fn fuse_gt(scenes: &[PathBuf], inputs: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let mut dirs = scenes.to_vec();
    if let Some(root) = inputs {
        dirs.extend(discover_scenes(root)?.into_iter().map(|s| s.dir));
    }
    if dirs.is_empty() {
        return Err(CliError::Config("give --scene or --inputs".into()));
    }
    if out.is_some() && dirs.len() > 1 {
        return Err(CliError::Config("--out needs exactly one scene".into()));
    }
    for dir in &dirs {
        let target = fuse_scene(dir, out)?;
        log::info!("wrote {}", target.display());
    }
    Ok(())
}

pub fn demosaic(input: &Path, out: &Path) -> CliResult<()> {
    let (frame, _) = read_bayer_frame(input)?;
    let rgb = nn_demosaic(&frame.normalize())?;
    // Keep the sensor levels and CFA so `mosaic` can restore the counts exactly.
    let mut sidecar = rgb_sidecar(&rgb, frame.levels());
    sidecar.cfa = Some(frame.cfa());
    write_raw16(out, &sidecar, &quantize_rgb(&rgb, frame.levels()))?;
    Ok(())
}

pub fn mosaic_file(input: &Path, cfa: Option<CfaPattern>, out: &Path) -> CliResult<()> {
    let (sidecar, samples) = read_raw16(input)?;
    if sidecar.channels != 3 {
        return Err(Error::Malformed {
            path: input.to_path_buf(),
            reason: format!("expected 3 channels, found {}", sidecar.channels),
        }
        .into());
    }
    let rgb = rgb_from_samples(&sidecar, &samples)?;
    let cfa = cfa.or(sidecar.cfa).unwrap_or_default();
    let frame = mosaic(&rgb, cfa)?.to_raw(sidecar.levels()?);
    write_bayer_frame(out, &frame)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DownsampleMethod {
    Nearest,
    Bilinear,
}

pub fn downsample(input: &Path, method: DownsampleMethod, out: &Path) -> CliResult<()> {
    let (rgb, levels) = read_rgb16(input)?;
    let small = match method {
        DownsampleMethod::Nearest => nn_downsample_2x(&rgb)?,
        DownsampleMethod::Bilinear => bilinear_downsample_2x(&rgb)?,
    };
    burstsynth::io::write_rgb16(out, &small, levels)?;
    Ok(())
}

pub struct MotionSource {
    pub dataset: Option<PathBuf>,
    pub uniform: bool,
    pub max_translation: f64,
    pub max_rotation: f64,
}

pub fn sample_motion(
    source: &MotionSource,
    frames: usize,
    count: usize,
    seed: u64,
    out: Option<&Path>,
) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dataset = match (&source.dataset, source.uniform) {
        (Some(path), false) => Some(MotionDataset::load(path)?),
        (None, true) => None,
        _ => {
            return Err(CliError::Config(
                "give exactly one of --dataset and --uniform".into(),
            ))
        }
    };
    let bursts = (0..count)
        .map(|_| match &dataset {
            Some(ds) => sample_burst_motion(ds, frames, &mut rng),
            None => sample_uniform_motion(
                source.max_translation,
                source.max_rotation,
                frames,
                &mut rng,
            ),
        })
        .collect::<Result<Vec<_>, _>>()?;
    emit_json(&MotionDataset::from_bursts(&bursts)?, out)
}

pub fn estimate_h(correspondences: &Path, out: Option<&Path>) -> CliResult<()> {
    let pairs = load_correspondences(correspondences)?;
    emit_json(&estimate_dlt(&pairs)?, out)
}

pub fn stats_motion(files: &[PathBuf], out: Option<&Path>) -> CliResult<()> {
    if files.is_empty() {
        return Err(CliError::Config("no motion files given".into()));
    }
    let mut bursts = Vec::new();
    for path in files {
        bursts.extend(MotionDataset::load(path)?.bursts());
    }
    emit_json(&trajectory_stats(&bursts)?, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MetricMode {
    Luma,
    PerChannel,
}

fn load_pair_list(path: &Path) -> CliResult<Vec<(PathBuf, PathBuf)>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let pairs: Vec<[PathBuf; 2]> = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    // Relative entries are resolved against the list's directory.
    let base = path.parent().unwrap_or(Path::new(""));
    Ok(pairs
        .into_iter()
        .map(|[a, b]| (base.join(a), base.join(b)))
        .collect())
}

pub fn metrics(
    pairs: &[PathBuf],
    pair_list: Option<&Path>,
    mode: MetricMode,
    workers: usize,
    out: Option<&Path>,
) -> CliResult<()> {
    let mut all: Vec<(PathBuf, PathBuf)> = pairs
        .chunks(2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect();
    if let Some(list) = pair_list {
        all.extend(load_pair_list(list)?);
    }
    if all.is_empty() {
        return Err(CliError::Config("no image pairs given".into()));
    }
    if workers == 0 {
        return Err(CliError::Config("workers must be at least 1".into()));
    }
    let opts = SsimOptions {
        mode: match mode {
            MetricMode::Luma => SsimMode::Luma,
            MetricMode::PerChannel => SsimMode::PerChannel,
        },
        ..SsimOptions::default()
    };
    let load = |p: &Path| -> CliResult<RgbImage> { Ok(read_rgb16(p)?.0) };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let per_image = pool.install(|| {
        all.par_iter()
            .map(|(a, b)| Ok(evaluate_pair(&load(a)?, &load(b)?, &opts)?))
            .collect::<CliResult<Vec<_>>>()
    })?;
    emit_json(&MetricReport::from_per_image(per_image), out)
}
