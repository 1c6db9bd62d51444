use rand::Rng;

use super::{Homography, MotionDataset};
use crate::error::{Error, Result};

/// Draw a burst of `num_frames` homographies from the empirical dataset.
///
/// Frame 0 is the identity. Frame `i` (1-based index `i + 1`) is drawn
/// uniformly from the homographies observed at that index, independently
/// of the other frames.
pub fn sample_burst_motion<R: Rng + ?Sized>(
    dataset: &MotionDataset,
    num_frames: usize,
    rng: &mut R,
) -> Result<Vec<Homography>> {
    if num_frames == 0 {
        return Err(Error::InvalidArgument(
            "burst needs at least one frame".into(),
        ));
    }
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("motion dataset is empty".into()));
    }
    let mut out = Vec::with_capacity(num_frames);
    out.push(Homography::identity());
    for index in 2..=num_frames {
        let bucket = dataset.bucket(index);
        if bucket.is_empty() {
            return Err(Error::EmptyBucket(index));
        }
        out.push(*bucket[rng.random_range(0..bucket.len())]);
    }
    Ok(out)
}

/// Uniform baseline motion: frame 0 is the identity, later frames translate
/// by `U[-max_translation, max_translation]^2` after rotating by
/// `U[-max_rotation, max_rotation]` about the (centered) origin.
pub fn sample_uniform_motion<R: Rng + ?Sized>(
    max_translation: f64,
    max_rotation: f64,
    num_frames: usize,
    rng: &mut R,
) -> Result<Vec<Homography>> {
    if !(max_translation >= 0.0) || !(max_rotation >= 0.0) {
        return Err(Error::InvalidArgument(
            "motion bounds must be non-negative".into(),
        ));
    }
    let draw = |bound: f64, rng: &mut R| {
        if bound > 0.0 {
            rng.random_range(-bound..=bound)
        } else {
            0.0
        }
    };
    let mut out = Vec::with_capacity(num_frames);
    for i in 0..num_frames {
        if i == 0 {
            out.push(Homography::identity());
            continue;
        }
        let tx = draw(max_translation, rng);
        let ty = draw(max_translation, rng);
        let theta = draw(max_rotation, rng);
        let h = if theta == 0.0 {
            Homography::translation(tx, ty)
        } else {
            Homography::translation(tx, ty).compose(&Homography::rotation(theta))?
        };
        out.push(h);
    }
    Ok(out)
}
