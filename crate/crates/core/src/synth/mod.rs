//! LR-HR burst pair generation.
//!
//! Two pipelines produce [`BurstSample`]s:
//!
//! - [`synthesize_ours`] warps real short-exposure HR RAW frames with sampled
//!   handheld homographies and downsamples by nearest neighbor, so the LR
//!   burst keeps the sensor's own noise. No synthetic noise is added.
//! - [`synthesize_baseline`] derives every frame from the ground truth with
//!   uniform motion, bilinear downsampling and synthetic read + shot noise.
//!
//! LR frames are always packed RGGB at half the LR mosaic resolution; the
//! ground truth sits at twice the LR mosaic resolution.

mod fuse;
mod patches;
mod pipeline;
mod store;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motion::Homography;
use crate::raw::{Levels, PackedRaw4, RgbImage};

pub use fuse::fuse_exposures;
pub use patches::{crop_patch, extract_patches, extract_random_patches};
pub use pipeline::{
    apply_noise, render_baseline_lr, render_ours_lr, safety_margin_lr, synthesize_baseline,
    synthesize_ours, BaselineOptions, OursOptions, LR_CFA,
};
pub use store::{
    read_dataset, read_manifest, sha256_hex, write_dataset, DatasetManifest, DatasetWriter,
    FORMAT_VERSION, MANIFEST_FILE,
};

/// Which generator produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Ours,
    Baseline,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ours" => Ok(Variant::Ours),
            "baseline" => Ok(Variant::Baseline),
            other => Err(Error::InvalidArgument(format!("unknown variant {other:?}"))),
        }
    }
}

/// Synthetic sensor noise: per-sample variance `shot_gain * signal + read_sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub shot_gain: f64,
    pub read_sigma: f64,
    pub seed: u64,
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.shot_gain >= 0.0 && self.shot_gain.is_finite())
            || !(self.read_sigma >= 0.0 && self.read_sigma.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "noise parameters must be finite and non-negative: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn variance(&self, signal: f64) -> f64 {
        self.shot_gain * signal.max(0.0) + self.read_sigma * self.read_sigma
    }
}

/// Ranges for per-burst log-uniform noise draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseRanges {
    pub shot_gain: [f64; 2],
    pub read_sigma: [f64; 2],
}

impl Default for NoiseRanges {
    fn default() -> Self {
        NoiseRanges {
            shot_gain: [1e-4, 1e-2],
            read_sigma: [1e-3, 2e-2],
        }
    }
}

impl NoiseRanges {
    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in [
            ("shot_gain", self.shot_gain),
            ("read_sigma", self.read_sigma),
        ] {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} range [{lo}, {hi}] must be positive and ordered"
                )));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NoiseParams {
        let log_uniform = |[lo, hi]: [f64; 2], rng: &mut R| {
            if hi > lo {
                (rng.random_range(lo.ln()..hi.ln())).exp()
            } else {
                lo
            }
        };
        let shot_gain = log_uniform(self.shot_gain, rng);
        let read_sigma = log_uniform(self.read_sigma, rng);
        NoiseParams {
            shot_gain,
            read_sigma,
            seed: rng.random(),
        }
    }
}

/// Provenance attached to every sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub scene_id: String,
    pub variant: Variant,
    /// Motion applied to each frame, at HR resolution, center-anchored.
    pub homographies: Vec<Homography>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Storage grid of the LR frames.
    pub lr_levels: Levels,
    /// Storage grid of the ground truth.
    pub gt_levels: Levels,
    /// Safety margin cropped from each side, in LR mosaic pixels.
    pub margin_lr: usize,
    /// Top-left of this sample in the uncropped LR mosaic.
    pub lr_origin: [usize; 2],
    /// Top-left of this sample in the uncropped HR frame; always `2 * lr_origin`.
    pub hr_origin: [usize; 2],
}

/// One training example: a packed LR burst and its aligned HR ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct BurstSample {
    pub lr_frames: Vec<PackedRaw4>,
    pub hr_gt: RgbImage,
    pub meta: SampleMeta,
}

impl BurstSample {
    pub fn num_frames(&self) -> usize {
        self.lr_frames.len()
    }

    /// LR mosaic size (packed size times two).
    pub fn lr_size(&self) -> (usize, usize) {
        let f = &self.lr_frames[0];
        (f.width() * 2, f.height() * 2)
    }

    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.lr_frames.first() else {
            return Err(Error::InvalidArgument("sample has no LR frames".into()));
        };
        if self
            .lr_frames
            .iter()
            .any(|f| f.width() != first.width() || f.height() != first.height())
        {
            return Err(Error::ShapeMismatch("LR frames differ in size".into()));
        }
        let (lw, lh) = self.lr_size();
        if self.hr_gt.width() != 2 * lw || self.hr_gt.height() != 2 * lh {
            return Err(Error::ShapeMismatch(format!(
                "ground truth {}x{} is not twice the {lw}x{lh} LR mosaic",
                self.hr_gt.width(),
                self.hr_gt.height()
            )));
        }
        if self.meta.homographies.len() != self.lr_frames.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} homographies for {} frames",
                self.meta.homographies.len(),
                self.lr_frames.len()
            )));
        }
        if !self.meta.homographies[0].is_identity() {
            return Err(Error::InvalidArgument(
                "base frame motion must be the identity".into(),
            ));
        }
        if self.meta.hr_origin != [2 * self.meta.lr_origin[0], 2 * self.meta.lr_origin[1]] {
            return Err(Error::InvalidArgument(
                "HR origin is not twice the LR origin".into(),
            ));
        }
        Ok(())
    }
}
