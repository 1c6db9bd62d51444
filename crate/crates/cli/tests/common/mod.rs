#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use burstsynth::io::{write_bayer_frame, write_raw16, Sidecar};
use burstsynth::motion::{MotionCapture, MotionDataset};
use burstsynth::{CfaPattern, Homography, Levels, RawBayerFrame, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SENSOR: Levels = Levels {
    black: 64,
    white: 1023,
};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_burstsynth"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn burstsynth")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "burstsynth {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

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

pub fn smooth_image(w: usize, h: usize, phase: f64) -> RgbImage {
    RgbImage::from_fn(w, h, |x, y| {
        let (x, y) = (x as f64 + phase, y as f64);
        [
            (0.5 + 0.3 * (x / 9.0).sin() * (y / 7.0).cos()) as f32,
            (0.5 + 0.25 * ((x + y) / 11.0).sin()) as f32,
            (0.5 + 0.2 * (x / 5.0).cos()) as f32,
        ]
    })
}

/// Handheld-like dataset: small rotations and translations.
pub fn motion_dataset(captures: usize, frames: usize, seed: u64) -> MotionDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MotionDataset::new(
        (0..captures)
            .map(|c| MotionCapture {
                id: format!("capture_{c:03}"),
                frames: (1..frames)
                    .map(|_| {
                        Homography::rotation(rng.random_range(-0.01..0.01))
                            .compose(&Homography::translation(
                                rng.random_range(-3.0..3.0),
                                rng.random_range(-3.0..3.0),
                            ))
                            .unwrap()
                    })
                    .collect(),
            })
            .collect(),
    )
}

/// `root/inputs/scene_XX/{short_YY.raw16, exp_YY.raw16, gt.rgb16}` plus
/// `root/motion.json`. Returns (inputs dir, motion file).
pub fn make_inputs(root: &Path, scenes: usize, size: usize, seed: u64) -> (PathBuf, PathBuf) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs = root.join("inputs");
    for i in 0..scenes {
        let dir = inputs.join(format!("scene_{i:02}"));
        std::fs::create_dir_all(&dir).unwrap();
        for k in 0..8 {
            let frame = random_frame(size, size, CfaPattern::Rggb, SENSOR, &mut rng);
            write_bayer_frame(&dir.join(format!("short_{k:02}.raw16")), &frame).unwrap();
        }
        for (k, scale) in [1.0, 2.0, 4.0].into_iter().enumerate() {
            let frame = random_frame(size, size, CfaPattern::Rggb, SENSOR, &mut rng);
            let sidecar = Sidecar {
                width: size,
                height: size,
                channels: 1,
                cfa: Some(CfaPattern::Rggb),
                black_level: SENSOR.black,
                white_level: SENSOR.white,
                exposure_scale: Some(scale),
            };
            write_raw16(
                &dir.join(format!("exp_{k:02}.raw16")),
                &sidecar,
                frame.data(),
            )
            .unwrap();
        }
        burstsynth::io::write_rgb16(
            &dir.join("gt.rgb16"),
            &smooth_image(size, size, i as f64),
            Levels::FULL,
        )
        .unwrap();
    }
    let motion = root.join("motion.json");
    motion_dataset(6, 8, seed ^ 0x5eed).save(&motion).unwrap();
    (inputs, motion)
}
