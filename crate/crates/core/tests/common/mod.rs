#![allow(dead_code)]

use burstsynth::{CfaPattern, Homography, Levels, RawBayerFrame, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sensor frame with independent uniform counts between the levels.
pub fn random_frame(
    w: usize,
    h: usize,
    cfa: CfaPattern,
    levels: Levels,
    rng: &mut impl Rng,
) -> RawBayerFrame {
    let data = (0..w * h)
        .map(|_| rng.random_range(levels.black..=levels.white))
        .collect();
    RawBayerFrame::new(w, h, cfa, levels, data).unwrap()
}

pub fn random_image(w: usize, h: usize, rng: &mut impl Rng) -> RgbImage {
    RgbImage::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()])
}

/// Band-limited test image with values inside [0.1, 0.9].
pub fn smooth_image(w: usize, h: usize) -> RgbImage {
    RgbImage::from_fn(w, h, |x, y| {
        let (x, y) = (x as f64, y as f64);
        let r = 0.5 + 0.2 * (x / 13.0).sin() + 0.15 * (y / 17.0).cos();
        let g = 0.5 + 0.3 * ((x + y) / 23.0).sin();
        let b = 0.5 + 0.25 * (x / 19.0).cos() * (y / 11.0).sin();
        [r as f32, g as f32, b as f32]
    })
}

/// Near-identity projective transform of a ~640x480 frame.
pub fn random_homography(rng: &mut impl Rng) -> Homography {
    let mut u = |s: f64| rng.random_range(-s..=s);
    Homography::from_rows([
        [1.0 + u(0.1), u(0.1), u(20.0)],
        [u(0.1), 1.0 + u(0.1), u(20.0)],
        [u(1e-4), u(1e-4), 1.0],
    ])
    .unwrap()
}

/// Bursts drifting linearly with a per-burst velocity plus a little jitter.
pub fn drifting_bursts(n: usize, frames: usize, rng: &mut impl Rng) -> Vec<Vec<Homography>> {
    (0..n)
        .map(|_| {
            let vx = rng.random_range(-2.0..=2.0);
            let vy = rng.random_range(-2.0..=2.0);
            (0..frames)
                .map(|i| {
                    if i == 0 {
                        return Homography::identity();
                    }
                    let jx: f64 = rng.random_range(-0.2..=0.2);
                    let jy: f64 = rng.random_range(-0.2..=0.2);
                    Homography::translation(vx * i as f64 + jx, vy * i as f64 + jy)
                })
                .collect()
        })
        .collect()
}

pub fn rmse_interior(a: &RgbImage, b: &RgbImage, border: usize) -> f64 {
    let mut acc = 0.0;
    let mut n = 0usize;
    for y in border..a.height() - border {
        for x in border..a.width() - border {
            let (p, q) = (a.get(x, y), b.get(x, y));
            for c in 0..3 {
                acc += (f64::from(p[c]) - f64::from(q[c])).powi(2);
                n += 1;
            }
        }
    }
    (acc / n as f64).sqrt()
}
