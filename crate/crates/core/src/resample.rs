//! Resampling kernels: 2x downsamplers and the perspective warp.

use crate::error::{Error, Result};
use crate::motion::{Homography, DET_EPS};
use crate::raw::RgbImage;

fn check_even(image: &RgbImage) -> Result<()> {
    let (w, h) = (image.width(), image.height());
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::InvalidDimensions {
            width: w,
            height: h,
            reason: "2x downsampling needs even dimensions",
        });
    }
    Ok(())
}

/// Keep the top-left pixel of every 2x2 block: `out(x, y) = in(2x, 2y)`.
///
/// No arithmetic touches the samples, so sensor noise passes through as-is.
pub fn nn_downsample_2x(image: &RgbImage) -> Result<RgbImage> {
    check_even(image)?;
    let (w, h) = (image.width() / 2, image.height() / 2);
    Ok(RgbImage::from_fn(w, h, |x, y| image.get(2 * x, 2 * y)))
}

/// Bilinear 2x reduction: each output pixel samples the input at the center
/// of its 2x2 block, i.e. the block average.
pub fn bilinear_downsample_2x(image: &RgbImage) -> Result<RgbImage> {
    check_even(image)?;
    let (w, h) = (image.width() / 2, image.height() / 2);
    Ok(RgbImage::from_fn(w, h, |x, y| {
        let mut acc = [0.0f64; 3];
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let p = image.get(2 * x + dx, 2 * y + dy);
            for c in 0..3 {
                acc[c] += f64::from(p[c]);
            }
        }
        acc.map(|v| (v * 0.25) as f32)
    }))
}

/// Bilinear lookup with edge replication outside the image.
#[inline]
pub fn sample_bilinear(image: &RgbImage, x: f64, y: f64) -> [f32; 3] {
    let max_x = (image.width() - 1) as f64;
    let max_y = (image.height() - 1) as f64;
    let x = if x.is_nan() { 0.0 } else { x.clamp(0.0, max_x) };
    let y = if y.is_nan() { 0.0 } else { y.clamp(0.0, max_y) };
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(image.width() - 1);
    let y1 = (y0 + 1).min(image.height() - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;

    let p00 = image.get(x0, y0);
    let p10 = image.get(x1, y0);
    let p01 = image.get(x0, y1);
    let p11 = image.get(x1, y1);
    let mut out = [0.0f32; 3];
    for c in 0..3 {
        let v = (1.0 - fx) * (1.0 - fy) * f64::from(p00[c])
            + fx * (1.0 - fy) * f64::from(p10[c])
            + (1.0 - fx) * fy * f64::from(p01[c])
            + fx * fy * f64::from(p11[c]);
        out[c] = v as f32;
    }
    out
}

/// Geometric center of the pixel grid, `((w - 1) / 2, (h - 1) / 2)`.
pub fn frame_center(width: usize, height: usize) -> (f64, f64) {
    ((width as f64 - 1.0) * 0.5, (height as f64 - 1.0) * 0.5)
}

/// Inverse-mapping perspective warp with bilinear interpolation.
///
/// Output pixel `p` takes the input value at `H^-1 p`. With `center_anchored`
/// the homography acts on coordinates relative to [`frame_center`].
/// Samples falling outside the input replicate the nearest edge pixel.
pub fn warp_perspective(
    image: &RgbImage,
    h: &Homography,
    center_anchored: bool,
) -> Result<RgbImage> {
    let inv = h.inverse()?;
    let m = inv.matrix();
    let (cx, cy) = if center_anchored {
        frame_center(image.width(), image.height())
    } else {
        (0.0, 0.0)
    };
    Ok(RgbImage::from_fn(image.width(), image.height(), |x, y| {
        let qx = x as f64 - cx;
        let qy = y as f64 - cy;
        let w = m[(2, 0)] * qx + m[(2, 1)] * qy + m[(2, 2)];
        let (sx, sy) = if w.abs() < DET_EPS {
            (f64::NAN, f64::NAN)
        } else {
            (
                (m[(0, 0)] * qx + m[(0, 1)] * qy + m[(0, 2)]) / w + cx,
                (m[(1, 0)] * qx + m[(1, 1)] * qy + m[(1, 2)]) / w + cy,
            )
        };
        sample_bilinear(image, sx, sy)
    }))
}
