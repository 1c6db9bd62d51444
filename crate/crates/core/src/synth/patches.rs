use rand::Rng;

use super::BurstSample;
use crate::error::{Error, Result};

fn check_size(sample: &BurstSample, size_hr: usize) -> Result<(usize, usize)> {
    if size_hr == 0 || !size_hr.is_multiple_of(4) {
        return Err(Error::InvalidArgument(format!(
            "HR patch size {size_hr} must be a positive multiple of 4"
        )));
    }
    let (w, h) = (sample.hr_gt.width(), sample.hr_gt.height());
    if size_hr > w || size_hr > h {
        return Err(Error::PatchOutOfBounds {
            x: 0,
            y: 0,
            size: size_hr,
            width: w,
            height: h,
        });
    }
    Ok((w, h))
}

/// Cut the patch whose HR top-left corner is `(x, y)` in sample coordinates.
/// Both must be multiples of 4 so the LR mosaic origin stays on a CFA tile.
pub fn crop_patch(sample: &BurstSample, x: usize, y: usize, size_hr: usize) -> Result<BurstSample> {
    let (w, h) = check_size(sample, size_hr)?;
    if !x.is_multiple_of(4) || !y.is_multiple_of(4) {
        return Err(Error::InvalidArgument(format!(
            "HR patch origin ({x}, {y}) must be a multiple of 4"
        )));
    }
    if x + size_hr > w || y + size_hr > h {
        return Err(Error::PatchOutOfBounds {
            x,
            y,
            size: size_hr,
            width: w,
            height: h,
        });
    }
    let (px, ps) = (x / 4, size_hr / 4);
    let py = y / 4;
    let lr_frames = sample
        .lr_frames
        .iter()
        .map(|f| f.crop(px, py, ps, ps))
        .collect::<Result<Vec<_>>>()?;
    let mut meta = sample.meta.clone();
    meta.lr_origin = [meta.lr_origin[0] + x / 2, meta.lr_origin[1] + y / 2];
    meta.hr_origin = [meta.hr_origin[0] + x, meta.hr_origin[1] + y];
    Ok(BurstSample {
        lr_frames,
        hr_gt: sample.hr_gt.crop(x, y, size_hr, size_hr)?,
        meta,
    })
}

/// Regular grid of square patches in row-major order. `size_hr` and
/// `stride_hr` are HR pixels and must be multiples of 4.
pub fn extract_patches(
    sample: &BurstSample,
    size_hr: usize,
    stride_hr: usize,
) -> Result<Vec<BurstSample>> {
    let (w, h) = check_size(sample, size_hr)?;
    if stride_hr == 0 || !stride_hr.is_multiple_of(4) {
        return Err(Error::InvalidArgument(format!(
            "HR stride {stride_hr} must be a positive multiple of 4"
        )));
    }
    let mut out = Vec::new();
    for y in (0..=h - size_hr).step_by(stride_hr) {
        for x in (0..=w - size_hr).step_by(stride_hr) {
            out.push(crop_patch(sample, x, y, size_hr)?);
        }
    }
    Ok(out)
}

/// `count` patches at uniformly drawn tile-aligned positions.
pub fn extract_random_patches<R: Rng + ?Sized>(
    sample: &BurstSample,
    size_hr: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<BurstSample>> {
    let (w, h) = check_size(sample, size_hr)?;
    let (nx, ny) = ((w - size_hr) / 4, (h - size_hr) / 4);
    (0..count)
        .map(|_| {
            let x = 4 * rng.random_range(0..=nx);
            let y = 4 * rng.random_range(0..=ny);
            crop_patch(sample, x, y, size_hr)
        })
        .collect()
}
