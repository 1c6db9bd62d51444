use crate::error::{Error, Result};
use crate::raw::RgbImage;

/// Exposure-normalized mean of registered frames, clamped to `[0, 1]`.
///
/// Frame `k` is divided by `scales[k]` before averaging, so frames captured
/// at different exposures contribute on a common radiometric scale.
pub fn fuse_exposures(frames: &[RgbImage], scales: &[f64]) -> Result<RgbImage> {
    let Some(first) = frames.first() else {
        return Err(Error::InvalidArgument(
            "fusion needs at least one frame".into(),
        ));
    };
    if frames.len() != scales.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} frames but {} exposure scales",
            frames.len(),
            scales.len()
        )));
    }
    if let Some(bad) = scales.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "exposure scale {bad} must be positive"
        )));
    }
    if frames.iter().any(|f| !f.same_shape(first)) {
        return Err(Error::ShapeMismatch("fusion frames differ in size".into()));
    }
    let n = frames.len() as f64;
    let mut acc = vec![0.0f64; first.data().len()];
    for (frame, &scale) in frames.iter().zip(scales) {
        for (a, &v) in acc.iter_mut().zip(frame.data()) {
            *a += f64::from(v) / scale;
        }
    }
    let data = acc
        .into_iter()
        .map(|a| (a / n).clamp(0.0, 1.0) as f32)
        .collect();
    RgbImage::new(first.width(), first.height(), data)
}
