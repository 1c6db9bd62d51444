//! The `synthesize` run: scenes are processed on a worker pool, each with its
//! own seeded generator, and committed by a single writer in scene order.

use std::path::{Path, PathBuf};

use burstsynth::io::{read_bayer_frame, read_rgb16};
use burstsynth::motion::{sample_burst_motion, MotionDataset};
use burstsynth::synth::{
    extract_patches, synthesize_baseline, synthesize_ours, BaselineOptions, BurstSample,
    DatasetManifest, DatasetWriter, OursOptions, Variant, FORMAT_VERSION,
};
use burstsynth::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};

pub const GT_FILE: &str = "gt.rgb16";
pub const SHORT_PREFIX: &str = "short_";
pub const EXPOSURE_PREFIX: &str = "exp_";

#[derive(Debug, Clone)]
pub struct Scene {
    pub id: String,
    pub dir: PathBuf,
}

/// Sub-directories of `inputs`, sorted by name.
pub fn discover_scenes(inputs: &Path) -> CliResult<Vec<Scene>> {
    let mut scenes = Vec::new();
    for entry in std::fs::read_dir(inputs).map_err(|e| CliError::io(inputs, e))? {
        let entry = entry.map_err(|e| CliError::io(inputs, e))?;
        let path = entry.path();
        if path.is_dir() {
            scenes.push(Scene {
                id: entry.file_name().to_string_lossy().into_owned(),
                dir: path,
            });
        }
    }
    scenes.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(scenes)
}

/// `<prefix>*.raw16` files in `dir`, sorted by name.
pub fn raw16_files(dir: &Path, prefix: &str) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with(prefix) && name.ends_with(".raw16") {
            files.push(entry.path());
        }
    }
    files.sort();
    Ok(files)
}

/// Generator for scene `index`: the run seed selects the key, the scene
/// index the stream.
pub fn scene_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn build_scene(
    cfg: &PipelineConfig,
    motion: Option<&MotionDataset>,
    scene: &Scene,
    index: usize,
) -> CliResult<Vec<BurstSample>> {
    let mut rng = scene_rng(cfg.seed, index);
    let (gt, _) = read_rgb16(&scene.dir.join(GT_FILE))?;
    let patch_size = cfg.patch_size.unwrap_or(4);
    let sample = match cfg.variant {
        Variant::Ours => {
            let paths = raw16_files(&scene.dir, SHORT_PREFIX)?;
            if paths.len() < cfg.frames {
                return Err(Error::InvalidArgument(format!(
                    "scene {} has {} short-exposure frames, {} needed",
                    scene.id,
                    paths.len(),
                    cfg.frames
                ))
                .into());
            }
            let frames = paths[..cfg.frames]
                .iter()
                .map(|p| read_bayer_frame(p).map(|(f, _)| f))
                .collect::<Result<Vec<_>, _>>()?;
            let dataset = motion.expect("validated: ours has a motion dataset");
            let mut motions = sample_burst_motion(dataset, cfg.frames, &mut rng)?;
            if cfg.motion_scale != 1.0 {
                motions = motions
                    .iter()
                    .map(|h| h.rescaled(cfg.motion_scale))
                    .collect::<Result<_, _>>()?;
            }
            let opts = OursOptions {
                scene_id: scene.id.clone(),
                patch_size,
                seed: Some(cfg.seed),
            };
            synthesize_ours(&frames, &gt, &motions, &opts)?
        }
        Variant::Baseline => {
            let noise = cfg.noise.sample(&mut rng);
            let opts = BaselineOptions {
                scene_id: scene.id.clone(),
                num_frames: cfg.frames,
                max_translation: cfg.max_translation,
                max_rotation: cfg.max_rotation,
                noise,
                patch_size,
                seed: rng.random(),
            };
            synthesize_baseline(&gt, &opts)?
        }
    };
    match cfg.patch_size {
        Some(size) => Ok(extract_patches(&sample, size, cfg.stride.unwrap_or(size))?),
        None => Ok(vec![sample]),
    }
}

fn ensure_empty_output(dir: &Path) -> CliResult<()> {
    if dir.exists() {
        let mut entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
        if entries.next().is_some() {
            return Err(CliError::Config(format!(
                "output directory {} is not empty",
                dir.display()
            )));
        }
    }
    Ok(())
}

pub fn run(cfg: &PipelineConfig) -> CliResult<DatasetManifest> {
    cfg.validate()?;
    let inputs = cfg.inputs.as_deref().expect("validated");
    let output = cfg.output.as_deref().expect("validated");
    ensure_empty_output(output)?;

    let scenes = discover_scenes(inputs)?;
    if scenes.is_empty() {
        return Err(Error::InvalidArgument(format!("no scenes under {}", inputs.display())).into());
    }
    let motion = match (&cfg.variant, &cfg.motion_dataset) {
        (Variant::Ours, Some(path)) => {
            let ds = MotionDataset::load(path)?;
            if ds.is_empty() {
                return Err(Error::InvalidArgument("motion dataset is empty".into()).into());
            }
            Some(ds)
        }
        _ => None,
    };
    log::info!(
        "{} scene(s), variant {:?}, {} worker(s)",
        scenes.len(),
        cfg.variant,
        cfg.workers
    );

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let per_scene: Vec<CliResult<Vec<BurstSample>>> = pool.install(|| {
        scenes
            .par_iter()
            .enumerate()
            .map(|(i, scene)| build_scene(cfg, motion.as_ref(), scene, i))
            .collect()
    });

    let mut writer = DatasetWriter::create(output)?;
    let mut scene_log = Vec::with_capacity(scenes.len());
    for (i, (scene, samples)) in scenes.iter().zip(per_scene).enumerate() {
        let samples = samples?;
        log::info!("scene {}: {} sample(s)", scene.id, samples.len());
        for sample in &samples {
            writer.add(sample)?;
        }
        scene_log.push(json!({"id": scene.id, "stream": i, "samples": samples.len()}));
    }
    // Worker count and output location do not affect the contents.
    let mut recorded = serde_json::to_value(cfg).expect("config serialization");
    if let Some(map) = recorded.as_object_mut() {
        map.remove("output");
        map.remove("workers");
    }
    let provenance = json!({
        "tool": "burstsynth",
        "version": env!("CARGO_PKG_VERSION"),
        "format_version": FORMAT_VERSION,
        "config_hash": cfg.content_hash(),
        "seed": cfg.seed,
        "config": recorded,
        "scenes": scene_log,
    });
    Ok(writer.finish(Some(provenance))?)
}
