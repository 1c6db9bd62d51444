use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{BurstSample, NoiseParams, SampleMeta, Variant};
use crate::demosaic::nn_demosaic;
use crate::error::{Error, Result};
use crate::motion::{sample_uniform_motion, Homography};
use crate::raw::{mosaic, pack_raw4, CfaPattern, Levels, RawBayerFrame, RgbImage};
use crate::resample::{bilinear_downsample_2x, frame_center, nn_downsample_2x, warp_perspective};

/// CFA layout of every synthesized LR frame.
pub const LR_CFA: CfaPattern = CfaPattern::Rggb;

#[derive(Debug, Clone, PartialEq)]
pub struct OursOptions {
    pub scene_id: String,
    /// Smallest HR patch the cropped region must still hold.
    pub patch_size: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOptions {
    pub scene_id: String,
    pub num_frames: usize,
    /// Translation bound in HR pixels.
    pub max_translation: f64,
    /// Rotation bound in radians.
    pub max_rotation: f64,
    pub noise: NoiseParams,
    pub patch_size: usize,
    /// Seed of the motion draw; the noise has its own seed.
    pub seed: u64,
}

fn check_hr_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 || !width.is_multiple_of(4) || !height.is_multiple_of(4) {
        return Err(Error::InvalidDimensions {
            width,
            height,
            reason: "HR frames must be a multiple of 4 so the LR mosaic keeps whole CFA tiles",
        });
    }
    Ok(())
}

/// Margin (LR mosaic pixels, even) that keeps every warped sample inside the
/// source frame: the largest corner displacement of any motion or its
/// inverse, halved and rounded up to an even integer.
pub fn safety_margin_lr(
    motions: &[Homography],
    hr_width: usize,
    hr_height: usize,
) -> Result<usize> {
    let (cx, cy) = frame_center(hr_width, hr_height);
    let corners = [(-cx, -cy), (cx, -cy), (-cx, cy), (cx, cy)];
    let mut worst = 0.0f64;
    for h in motions.iter().filter(|h| !h.is_identity()) {
        for m in [*h, h.inverse()?] {
            for &q in &corners {
                let (x, y) = m.apply(q)?;
                worst = worst.max((x - q.0).abs()).max((y - q.1).abs());
            }
        }
    }
    let half = (worst / 2.0).ceil() as usize;
    Ok(half + half % 2)
}

/// LR RGB rendering of one short-exposure frame: demosaic, warp (skipped for
/// the base frame), nearest-neighbor 2x downsample.
pub fn render_ours_lr(frame: &RawBayerFrame, motion: Option<&Homography>) -> Result<RgbImage> {
    let rgb = nn_demosaic(&frame.normalize())?;
    let rgb = match motion {
        Some(h) => warp_perspective(&rgb, h, true)?,
        None => rgb,
    };
    nn_downsample_2x(&rgb)
}

/// Noise-free LR RGB rendering of the baseline: bilinear warp of the ground
/// truth, then bilinear 2x downsample.
pub fn render_baseline_lr(hr_gt: &RgbImage, motion: Option<&Homography>) -> Result<RgbImage> {
    match motion {
        Some(h) => bilinear_downsample_2x(&warp_perspective(hr_gt, h, true)?),
        None => bilinear_downsample_2x(hr_gt),
    }
}

/// Add `N(0, shot_gain * s + read_sigma^2)` to every sample, then clamp.
pub fn apply_noise<R: Rng + ?Sized>(
    image: &RgbImage,
    noise: &NoiseParams,
    rng: &mut R,
) -> RgbImage {
    let mut out = image.clone();
    for v in out.data_mut() {
        let std = noise.variance(f64::from(*v)).sqrt();
        let z: f64 = rng.sample(StandardNormal);
        *v = (f64::from(*v) + std * z).clamp(0.0, 1.0) as f32;
    }
    out
}

fn valid_region(
    hr_width: usize,
    hr_height: usize,
    margin: usize,
    patch_size: usize,
) -> Result<(usize, usize)> {
    let (lw, lh) = (hr_width / 2, hr_height / 2);
    let exhausted = Error::MarginExhausted {
        margin,
        patch: patch_size,
    };
    if lw <= 2 * margin || lh <= 2 * margin {
        return Err(exhausted);
    }
    let (cw, ch) = (lw - 2 * margin, lh - 2 * margin);
    if 2 * cw < patch_size || 2 * ch < patch_size {
        return Err(exhausted);
    }
    Ok((cw, ch))
}

fn finish_frame(
    lr_rgb: &RgbImage,
    margin: usize,
    size: (usize, usize),
    levels: Levels,
) -> Result<crate::raw::PackedRaw4> {
    let plane = mosaic(lr_rgb, LR_CFA)?
        .crop(margin, margin, size.0, size.1)?
        .snapped(levels);
    Ok(pack_raw4(&plane))
}

/// Build a sample from registered short-exposure HR frames and their fused
/// ground truth. Deterministic: no randomness enters here.
pub fn synthesize_ours(
    frames: &[RawBayerFrame],
    hr_gt: &RgbImage,
    motions: &[Homography],
    opts: &OursOptions,
) -> Result<BurstSample> {
    let Some(base) = frames.first() else {
        return Err(Error::InvalidArgument("no short-exposure frames".into()));
    };
    if motions.len() != frames.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} frames but {} motions",
            frames.len(),
            motions.len()
        )));
    }
    if !motions[0].is_identity() {
        return Err(Error::InvalidArgument(
            "base frame motion must be the identity".into(),
        ));
    }
    let (w, h) = (base.width(), base.height());
    check_hr_dims(w, h)?;
    if frames.iter().any(|f| {
        f.width() != w || f.height() != h || f.cfa() != base.cfa() || f.levels() != base.levels()
    }) {
        return Err(Error::ShapeMismatch(
            "short-exposure frames differ in geometry, CFA or levels".into(),
        ));
    }
    if hr_gt.width() != w || hr_gt.height() != h {
        return Err(Error::ShapeMismatch(format!(
            "ground truth {}x{} vs frames {w}x{h}",
            hr_gt.width(),
            hr_gt.height()
        )));
    }

    let margin = safety_margin_lr(motions, w, h)?;
    let size = valid_region(w, h, margin, opts.patch_size)?;
    log::debug!(
        "{}: margin {margin} LR px, region {}x{}",
        opts.scene_id,
        size.0,
        size.1
    );
    let lr_levels = base.levels();
    let lr_frames = frames
        .iter()
        .zip(motions)
        .enumerate()
        .map(|(i, (frame, motion))| {
            let lr = render_ours_lr(frame, (i > 0).then_some(motion))?;
            finish_frame(&lr, margin, size, lr_levels)
        })
        .collect::<Result<Vec<_>>>()?;
    let gt_levels = Levels::FULL;
    let hr_gt = hr_gt
        .crop(2 * margin, 2 * margin, 2 * size.0, 2 * size.1)?
        .snapped(gt_levels);

    let sample = BurstSample {
        lr_frames,
        hr_gt,
        meta: SampleMeta {
            scene_id: opts.scene_id.clone(),
            variant: Variant::Ours,
            homographies: motions.to_vec(),
            noise: None,
            seed: opts.seed,
            lr_levels,
            gt_levels,
            margin_lr: margin,
            lr_origin: [margin, margin],
            hr_origin: [2 * margin, 2 * margin],
        },
    };
    sample.validate()?;
    Ok(sample)
}

/// Burst derived from the ground truth alone: uniform motion, bilinear
/// resampling and synthetic read + shot noise.
pub fn synthesize_baseline(hr_gt: &RgbImage, opts: &BaselineOptions) -> Result<BurstSample> {
    if opts.num_frames == 0 {
        return Err(Error::InvalidArgument(
            "burst needs at least one frame".into(),
        ));
    }
    opts.noise.validate()?;
    let (w, h) = (hr_gt.width(), hr_gt.height());
    check_hr_dims(w, h)?;

    let mut motion_rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let motions = sample_uniform_motion(
        opts.max_translation,
        opts.max_rotation,
        opts.num_frames,
        &mut motion_rng,
    )?;
    let margin = safety_margin_lr(&motions, w, h)?;
    let size = valid_region(w, h, margin, opts.patch_size)?;
    log::debug!(
        "{}: margin {margin} LR px, region {}x{}",
        opts.scene_id,
        size.0,
        size.1
    );
    let levels = Levels::FULL;
    let mut noise_rng = ChaCha8Rng::seed_from_u64(opts.noise.seed);
    let lr_frames = motions
        .iter()
        .enumerate()
        .map(|(i, motion)| {
            let clean = render_baseline_lr(hr_gt, (i > 0).then_some(motion))?;
            let noisy = apply_noise(&clean, &opts.noise, &mut noise_rng);
            finish_frame(&noisy, margin, size, levels)
        })
        .collect::<Result<Vec<_>>>()?;
    let gt = hr_gt
        .crop(2 * margin, 2 * margin, 2 * size.0, 2 * size.1)?
        .snapped(levels);

    let sample = BurstSample {
        lr_frames,
        hr_gt: gt,
        meta: SampleMeta {
            scene_id: opts.scene_id.clone(),
            variant: Variant::Baseline,
            homographies: motions,
            noise: Some(opts.noise),
            seed: Some(opts.seed),
            lr_levels: levels,
            gt_levels: levels,
            margin_lr: margin,
            lr_origin: [margin, margin],
            hr_origin: [2 * margin, 2 * margin],
        },
    };
    sample.validate()?;
    Ok(sample)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_for_identity_is_zero() {
        assert_eq!(
            safety_margin_lr(&[Homography::identity(); 4], 64, 64).unwrap(),
            0
        );
    }

    #[test]
    fn margin_rounds_up_to_even() {
        let t = |x: f64| Homography::translation(x, 0.0);
        assert_eq!(
            safety_margin_lr(&[Homography::identity(), t(2.0)], 64, 64).unwrap(),
            2
        );
        assert_eq!(
            safety_margin_lr(&[Homography::identity(), t(4.5)], 64, 64).unwrap(),
            4
        );
        assert_eq!(
            safety_margin_lr(&[Homography::identity(), t(-8.0)], 64, 64).unwrap(),
            4
        );
    }

    #[test]
    fn margin_covers_rotation_corners() {
        let r = Homography::rotation(0.01);
        let m = safety_margin_lr(&[Homography::identity(), r], 200, 100).unwrap();
        // Corner (99.5, 49.5) moves by about 0.01 * 99.5 vertically.
        assert_eq!(m, 2);
    }

    #[test]
    fn hr_size_must_be_multiple_of_four() {
        let gt = RgbImage::filled(30, 32, [0.5; 3]);
        let opts = BaselineOptions {
            scene_id: "s".into(),
            num_frames: 2,
            max_translation: 0.0,
            max_rotation: 0.0,
            noise: NoiseParams {
                shot_gain: 0.0,
                read_sigma: 0.0,
                seed: 0,
            },
            patch_size: 8,
            seed: 0,
        };
        assert!(matches!(
            synthesize_baseline(&gt, &opts),
            Err(Error::InvalidDimensions { .. })
        ));
    }

    #[test]
    fn large_motion_exhausts_margin() {
        let frame =
            RawBayerFrame::new(32, 32, CfaPattern::Rggb, Levels::FULL, vec![100; 1024]).unwrap();
        let gt = RgbImage::filled(32, 32, [0.5; 3]);
        let motions = [Homography::identity(), Homography::translation(20.0, 0.0)];
        let opts = OursOptions {
            scene_id: "s".into(),
            patch_size: 16,
            seed: None,
        };
        assert!(matches!(
            synthesize_ours(&[frame.clone(), frame], &gt, &motions, &opts),
            Err(Error::MarginExhausted { .. })
        ));
    }
}
