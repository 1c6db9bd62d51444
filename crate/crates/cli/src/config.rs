//! Pipeline configuration: one JSON file, overridden field by field by
//! command-line flags.

use std::path::{Path, PathBuf};

use burstsynth::synth::{NoiseRanges, Variant};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Directory with one sub-directory per scene.
    pub inputs: Option<PathBuf>,
    /// Motion dataset JSON; required for the `ours` variant.
    pub motion_dataset: Option<PathBuf>,
    /// Run directory receiving the dataset and its manifest.
    pub output: Option<PathBuf>,
    pub variant: Variant,
    pub frames: usize,
    /// HR patch size; `null` keeps each scene as one sample.
    pub patch_size: Option<usize>,
    /// HR patch stride; defaults to the patch size.
    pub stride: Option<usize>,
    pub seed: u64,
    pub workers: usize,
    /// Factor applied to harvested homographies before use, for inputs at a
    /// different resolution than the motion captures.
    pub motion_scale: f64,
    /// Baseline translation bound, HR pixels.
    pub max_translation: f64,
    /// Baseline rotation bound, radians.
    pub max_rotation: f64,
    pub noise: NoiseRanges,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            inputs: None,
            motion_dataset: None,
            output: None,
            variant: Variant::Ours,
            frames: 8,
            patch_size: Some(256),
            stride: None,
            seed: 0,
            workers: 1,
            motion_scale: 1.0,
            max_translation: 24.0,
            max_rotation: 1.0f64.to_radians(),
            noise: NoiseRanges::default(),
        }
    }
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub inputs: Option<PathBuf>,
    pub motion_dataset: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub variant: Option<Variant>,
    pub frames: Option<usize>,
    pub patch_size: Option<usize>,
    pub stride: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub motion_scale: Option<f64>,
    pub max_translation: Option<f64>,
    pub max_rotation: Option<f64>,
    pub shot_gain: Option<[f64; 2]>,
    pub read_sigma: Option<[f64; 2]>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: Overrides) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = o.$field {
                    self.$field = v.into();
                }
            )*};
        }
        set!(
            inputs,
            motion_dataset,
            output,
            variant,
            frames,
            seed,
            workers
        );
        set!(motion_scale, max_translation, max_rotation);
        if o.patch_size == Some(0) {
            self.patch_size = None;
        } else if o.patch_size.is_some() {
            self.patch_size = o.patch_size;
        }
        if o.stride.is_some() {
            self.stride = o.stride;
        }
        if let Some(r) = o.shot_gain {
            self.noise.shot_gain = r;
        }
        if let Some(r) = o.read_sigma {
            self.noise.read_sigma = r;
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let err = |m: String| Err(CliError::Config(m));
        let Some(inputs) = &self.inputs else {
            return err("no inputs directory given".into());
        };
        if !inputs.is_dir() {
            return err(format!(
                "inputs directory {} does not exist",
                inputs.display()
            ));
        }
        if self.output.is_none() {
            return err("no output directory given".into());
        }
        if self.variant == Variant::Ours {
            match &self.motion_dataset {
                None => return err("the ours variant needs a motion dataset".into()),
                Some(p) if !p.is_file() => {
                    return err(format!("motion dataset {} does not exist", p.display()))
                }
                Some(_) => {}
            }
        }
        if self.frames == 0 {
            return err("frames must be at least 1".into());
        }
        if self.workers == 0 {
            return err("workers must be at least 1".into());
        }
        if let Some(size) = self.patch_size {
            if size % 4 != 0 {
                return err(format!("patch size {size} must be a multiple of 4"));
            }
        }
        if let Some(stride) = self.stride {
            if stride == 0 || stride % 4 != 0 {
                return err(format!("stride {stride} must be a positive multiple of 4"));
            }
        }
        if !(self.motion_scale > 0.0 && self.motion_scale.is_finite()) {
            return err("motion_scale must be positive".into());
        }
        if !(self.max_translation >= 0.0) || !(self.max_rotation >= 0.0) {
            return err("motion bounds must be non-negative".into());
        }
        self.noise
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Hash of everything that determines the dataset contents. The output
    /// location is excluded so identical runs into different directories
    /// agree.
    pub fn content_hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        c.workers = 1;
        let bytes = serde_json::to_vec(&c).expect("config serialization");
        burstsynth::synth::sha256_hex(&bytes)
    }
}
