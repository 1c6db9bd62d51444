//! Full-reference image quality metrics: PSNR, SSIM and MS-SSIM.
//!
//! All metrics expect aligned, same-shape images in linear `[0, 1]` RGB.
//! SSIM variants run on Rec.601 luma by default; [`SsimMode::PerChannel`]
//! averages the three channels instead. LPIPS is not provided.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raw::RgbImage;

/// Standard five-scale MS-SSIM exponents.
pub const MS_SSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

fn check_shape(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if !a.same_shape(b) {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

pub fn mse(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    check_shape(a, b)?;
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (f64::from(x) - f64::from(y)).powi(2))
        .sum();
    Ok(sum / a.data().len() as f64)
}

/// `10 log10(peak^2 / MSE)`; `+inf` for identical images.
pub fn psnr(a: &RgbImage, b: &RgbImage, peak: f64) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?, peak))
}

pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SsimMode {
    #[default]
    Luma,
    PerChannel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsimOptions {
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub data_range: f64,
    pub mode: SsimMode,
}

impl Default for SsimOptions {
    fn default() -> Self {
        SsimOptions {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            data_range: 1.0,
            mode: SsimMode::Luma,
        }
    }
}

/// Single-channel `f64` plane used internally by the SSIM family.
#[derive(Debug, Clone)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn luma(image: &RgbImage) -> Plane {
        Plane {
            width: image.width(),
            height: image.height(),
            data: image
                .data()
                .chunks_exact(3)
                .map(|p| {
                    0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2])
                })
                .collect(),
        }
    }

    pub fn channel(image: &RgbImage, c: usize) -> Plane {
        Plane {
            width: image.width(),
            height: image.height(),
            data: image
                .data()
                .chunks_exact(3)
                .map(|p| f64::from(p[c]))
                .collect(),
        }
    }

    fn planes(image: &RgbImage, mode: SsimMode) -> Vec<Plane> {
        match mode {
            SsimMode::Luma => vec![Plane::luma(image)],
            SsimMode::PerChannel => (0..3).map(|c| Plane::channel(image, c)).collect(),
        }
    }

    /// 2x2 box reduction, dropping a trailing odd row/column.
    fn downsample(&self) -> Plane {
        let (w, h) = (self.width / 2, self.height / 2);
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let at = |dx: usize, dy: usize| self.data[(2 * y + dy) * self.width + 2 * x + dx];
                data.push(0.25 * (at(0, 0) + at(1, 0) + at(0, 1) + at(1, 1)));
            }
        }
        Plane {
            width: w,
            height: h,
            data,
        }
    }
}

pub fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let raw: Vec<f64> = (0..size)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Separable "valid" convolution (no padding).
fn filter_valid(data: &[f64], width: usize, height: usize, kernel: &[f64]) -> Vec<f64> {
    let k = kernel.len();
    let ow = width - k + 1;
    let oh = height - k + 1;
    let mut tmp = vec![0.0; ow * height];
    for y in 0..height {
        let row = &data[y * width..(y + 1) * width];
        for x in 0..ow {
            tmp[y * ow + x] = kernel.iter().zip(&row[x..x + k]).map(|(w, v)| w * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = kernel
                .iter()
                .enumerate()
                .map(|(i, w)| w * tmp[(y + i) * ow + x])
                .sum();
        }
    }
    out
}

/// Mean SSIM and mean contrast-structure term of two planes.
pub fn ssim_plane(a: &Plane, b: &Plane, opts: &SsimOptions) -> Result<(f64, f64)> {
    let win = opts.window;
    if a.width < win || a.height < win {
        return Err(Error::InvalidDimensions {
            width: a.width,
            height: a.height,
            reason: "image smaller than the SSIM window",
        });
    }
    let kernel = gaussian_kernel(win, opts.sigma);
    let (w, h) = (a.width, a.height);
    let prod = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
        a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect()
    };
    let mu_a = filter_valid(&a.data, w, h, &kernel);
    let mu_b = filter_valid(&b.data, w, h, &kernel);
    let e_aa = filter_valid(&prod(&|x, _| x * x), w, h, &kernel);
    let e_bb = filter_valid(&prod(&|_, y| y * y), w, h, &kernel);
    let e_ab = filter_valid(&prod(&|x, y| x * y), w, h, &kernel);

    let c1 = (opts.k1 * opts.data_range).powi(2);
    let c2 = (opts.k2 * opts.data_range).powi(2);
    let n = mu_a.len() as f64;
    let (mut ssim_sum, mut cs_sum) = (0.0, 0.0);
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let var_a = e_aa[i] - ma * ma;
        let var_b = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        let cs = (2.0 * cov + c2) / (var_a + var_b + c2);
        let l = (2.0 * (ma * mb) + c1) / (ma * ma + mb * mb + c1);
        ssim_sum += l * cs;
        cs_sum += cs;
    }
    Ok((ssim_sum / n, cs_sum / n))
}

pub fn ssim(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    ssim_with(a, b, &SsimOptions::default())
}

pub fn ssim_with(a: &RgbImage, b: &RgbImage, opts: &SsimOptions) -> Result<f64> {
    check_shape(a, b)?;
    let pa = Plane::planes(a, opts.mode);
    let pb = Plane::planes(b, opts.mode);
    let mut total = 0.0;
    for (x, y) in pa.iter().zip(&pb) {
        total += ssim_plane(x, y, opts)?.0;
    }
    Ok(total / pa.len() as f64)
}

/// MS-SSIM value together with the number of dyadic scales actually used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MsSsim {
    pub value: f64,
    pub scales: usize,
}

/// Largest scale count (at most 5) such that the coarsest scale still fits
/// the SSIM window.
pub fn ms_ssim_scales(width: usize, height: usize, window: usize) -> usize {
    let min_dim = width.min(height);
    (1..=MS_SSIM_WEIGHTS.len())
        .rev()
        .find(|&m| min_dim >= window << (m - 1))
        .unwrap_or(0)
}

fn ms_ssim_plane(a: &Plane, b: &Plane, scales: usize, opts: &SsimOptions) -> Result<f64> {
    let weights = &MS_SSIM_WEIGHTS[..scales];
    let total: f64 = weights.iter().sum();
    let mut a = a.clone();
    let mut b = b.clone();
    let mut value = 1.0;
    for (j, w) in weights.iter().enumerate() {
        let w = w / total;
        let (s, cs) = ssim_plane(&a, &b, opts)?;
        if j + 1 == scales {
            value *= s.max(0.0).powf(w);
        } else {
            value *= cs.max(0.0).powf(w);
            a = a.downsample();
            b = b.downsample();
        }
    }
    Ok(value)
}

/// Multi-scale SSIM. Images too small for five scales use fewer, with the
/// leading weights renormalized to sum to one.
pub fn ms_ssim(a: &RgbImage, b: &RgbImage) -> Result<MsSsim> {
    ms_ssim_with(a, b, &SsimOptions::default())
}

pub fn ms_ssim_with(a: &RgbImage, b: &RgbImage, opts: &SsimOptions) -> Result<MsSsim> {
    check_shape(a, b)?;
    let scales = ms_ssim_scales(a.width(), a.height(), opts.window);
    if scales == 0 {
        return Err(Error::InvalidDimensions {
            width: a.width(),
            height: a.height(),
            reason: "image smaller than the SSIM window",
        });
    }
    let pa = Plane::planes(a, opts.mode);
    let pb = Plane::planes(b, opts.mode);
    let mut total = 0.0;
    for (x, y) in pa.iter().zip(&pb) {
        total += ms_ssim_plane(x, y, scales, opts)?;
    }
    Ok(MsSsim {
        value: total / pa.len() as f64,
        scales,
    })
}

/// Metrics of one image pair. `psnr` is `None` for identical images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageMetrics {
    pub psnr: Option<f64>,
    pub ssim: f64,
    pub ms_ssim: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ms_ssim_scales: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub per_image: Vec<ImageMetrics>,
    pub mean: ImageMetrics,
}

impl MetricReport {
    /// Aggregate per-pair metrics. The mean PSNR is `None` when any pair is
    /// identical. `per_image` must not be empty.
    pub fn from_per_image(per_image: Vec<ImageMetrics>) -> MetricReport {
        let n = per_image.len() as f64;
        let psnr = per_image
            .iter()
            .map(|m| m.psnr)
            .sum::<Option<f64>>()
            .map(|s| s / n);
        let mean = ImageMetrics {
            psnr,
            ssim: per_image.iter().map(|m| m.ssim).sum::<f64>() / n,
            ms_ssim: per_image.iter().map(|m| m.ms_ssim).sum::<f64>() / n,
            ms_ssim_scales: None,
        };
        MetricReport { per_image, mean }
    }
}

fn finite_or_none(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn evaluate_pair(
    reference: &RgbImage,
    test: &RgbImage,
    opts: &SsimOptions,
) -> Result<ImageMetrics> {
    let ms = ms_ssim_with(reference, test, opts)?;
    Ok(ImageMetrics {
        psnr: finite_or_none(psnr(reference, test, opts.data_range)?),
        ssim: ssim_with(reference, test, opts)?,
        ms_ssim: ms.value,
        ms_ssim_scales: Some(ms.scales),
    })
}

/// Per-pair metrics and their mean.
pub fn evaluate(pairs: &[(RgbImage, RgbImage)], opts: &SsimOptions) -> Result<MetricReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no image pairs to evaluate".into()));
    }
    let per_image = pairs
        .iter()
        .map(|(a, b)| evaluate_pair(a, b, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricReport::from_per_image(per_image))
}
