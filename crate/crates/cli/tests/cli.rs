mod common;

use burstsynth::io::{read_bayer_frame, read_rgb16};
use burstsynth::motion::TrajectoryStats;
use burstsynth::synth::{read_dataset, DatasetManifest};
use burstsynth::{CfaPattern, Homography};
use common::{run, run_ok, s};
use rand::SeedableRng;

#[test]
fn demosaic_then_mosaic_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for cfa in CfaPattern::ALL {
        let raw = dir.path().join(format!("{}.raw16", cfa.name()));
        let frame = common::random_frame(24, 16, cfa, common::SENSOR, &mut rng);
        burstsynth::io::write_bayer_frame(&raw, &frame).unwrap();
        let rgb = dir.path().join("rgb.rgb16");
        let back = dir.path().join("back.raw16");
        run_ok(&["demosaic", "--input", s(&raw), "--out", s(&rgb)]);
        run_ok(&["mosaic", "--input", s(&rgb), "--out", s(&back)]);
        assert_eq!(std::fs::read(&back).unwrap(), std::fs::read(&raw).unwrap());
        assert_eq!(read_bayer_frame(&back).unwrap().0, frame);
    }
}

#[test]
fn downsample_halves() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("a.rgb16");
    burstsynth::io::write_rgb16(
        &img,
        &common::smooth_image(20, 12, 0.0),
        burstsynth::Levels::FULL,
    )
    .unwrap();
    let out = dir.path().join("b.rgb16");
    run_ok(&["downsample", "--input", s(&img), "--out", s(&out)]);
    let (small, _) = read_rgb16(&out).unwrap();
    let (big, _) = read_rgb16(&img).unwrap();
    assert_eq!((small.width(), small.height()), (10, 6));
    assert_eq!(small.get(3, 2), big.get(6, 4));
}

fn synthesize(
    inputs: &std::path::Path,
    motion: &std::path::Path,
    out: &std::path::Path,
    extra: &[&str],
) -> DatasetManifest {
    let mut args = vec![
        "synthesize",
        "--inputs",
        s(inputs),
        "--motion",
        s(motion),
        "--output",
        s(out),
        "--patch-size",
        "32",
        "--stride",
        "24",
    ];
    args.extend_from_slice(extra);
    run_ok(&args);
    serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn synthesize_is_deterministic() {
    let root = tempfile::tempdir().unwrap();
    let (inputs, motion) = common::make_inputs(root.path(), 3, 64, 1);
    let a = synthesize(
        &inputs,
        &motion,
        &root.path().join("a"),
        &["--variant", "ours", "--seed", "7"],
    );
    let b = synthesize(
        &inputs,
        &motion,
        &root.path().join("b"),
        &["--variant", "ours", "--seed", "7", "--workers", "3"],
    );
    assert_eq!(a, b);
    assert_eq!(
        std::fs::read(root.path().join("a/manifest.json")).unwrap(),
        std::fs::read(root.path().join("b/manifest.json")).unwrap()
    );
    let c = synthesize(
        &inputs,
        &motion,
        &root.path().join("c"),
        &["--variant", "ours", "--seed", "8"],
    );
    assert_ne!(a.files, c.files);
    let run = a.run.as_ref().unwrap();
    assert_eq!(run["seed"], 7);
    assert!(run["config_hash"].as_str().unwrap().len() == 64);

    let samples = read_dataset(&root.path().join("a")).unwrap();
    assert_eq!(samples.len(), a.samples.len());
    assert!(samples
        .iter()
        .all(|s| s.num_frames() == 8 && s.hr_gt.width() == 32));
}

#[test]
fn baseline_variant_with_config_file() {
    let root = tempfile::tempdir().unwrap();
    let (inputs, _) = common::make_inputs(root.path(), 2, 64, 2);
    let cfg = root.path().join("cfg.json");
    let text = serde_json::json!({
        "inputs": inputs, "variant": "baseline", "frames": 4, "patch_size": null,
        "seed": 11, "max_translation": 2.0, "max_rotation": 0.005,
        "noise": {"shot_gain": [0.001, 0.001], "read_sigma": [0.01, 0.01]}
    });
    std::fs::write(&cfg, text.to_string()).unwrap();
    let out = root.path().join("out");
    run_ok(&[
        "synthesize",
        "--config",
        s(&cfg),
        "--output",
        s(&out),
        "--frames",
        "3",
    ]);
    let samples = read_dataset(&out).unwrap();
    assert_eq!(samples.len(), 2);
    for sample in &samples {
        assert_eq!(sample.num_frames(), 3);
        let noise = sample.meta.noise.unwrap();
        assert_eq!((noise.shot_gain, noise.read_sigma), (0.001, 0.01));
    }
}

#[test]
fn fuse_gt_writes_ground_truth() {
    let root = tempfile::tempdir().unwrap();
    let (inputs, _) = common::make_inputs(root.path(), 2, 16, 3);
    for scene in ["scene_00", "scene_01"] {
        std::fs::remove_file(inputs.join(scene).join("gt.rgb16")).unwrap();
    }
    run_ok(&["fuse-gt", "--inputs", s(&inputs)]);
    let (gt, levels) = read_rgb16(&inputs.join("scene_01/gt.rgb16")).unwrap();
    assert_eq!((gt.width(), levels), (16, burstsynth::Levels::FULL));
}

#[test]
fn stats_motion_orders_drift_above_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let drift: Vec<Vec<Homography>> = (0..200)
        .map(|b| {
            let v = (b % 7) as f64 * 0.5 - 1.5;
            (0..8)
                .map(|i| Homography::translation(v * i as f64, -v * i as f64))
                .collect()
        })
        .collect();
    let drift_path = dir.path().join("drift.json");
    burstsynth::motion::MotionDataset::from_bursts(&drift)
        .unwrap()
        .save(&drift_path)
        .unwrap();
    let uniform_path = dir.path().join("uniform.json");
    run_ok(&[
        "sample-motion",
        "--uniform",
        "--frames",
        "8",
        "--count",
        "200",
        "--seed",
        "4",
        "--max-translation",
        "6",
        "--out",
        s(&uniform_path),
    ]);
    let stats = |p: &std::path::Path| -> TrajectoryStats {
        serde_json::from_slice(&run_ok(&["stats-motion", s(p)]).stdout).unwrap()
    };
    let (d, u) = (stats(&drift_path), stats(&uniform_path));
    assert!(d.lag1_autocorr_translation > 0.9);
    assert!(u.lag1_autocorr_translation.abs() < 0.2);
    assert!(d.lag1_autocorr_translation > u.lag1_autocorr_translation + 0.5);
}

#[test]
fn sample_motion_from_dataset_and_estimate_h() {
    let dir = tempfile::tempdir().unwrap();
    let ds_path = dir.path().join("motion.json");
    let ds = common::motion_dataset(4, 8, 9);
    ds.save(&ds_path).unwrap();
    let out = run_ok(&[
        "sample-motion",
        "--dataset",
        s(&ds_path),
        "--frames",
        "5",
        "--count",
        "3",
        "--seed",
        "1",
    ]);
    let drawn: burstsynth::motion::MotionDataset = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(drawn.len(), 3);
    assert!(drawn.captures.iter().all(|c| c.frame_count() == 5));

    let h =
        Homography::from_rows([[1.02, 0.01, 4.0], [-0.02, 0.98, -3.0], [1e-4, 2e-4, 1.0]]).unwrap();
    let pts: Vec<[[f64; 2]; 2]> = [
        (0.0, 0.0),
        (100.0, 0.0),
        (0.0, 80.0),
        (100.0, 80.0),
        (40.0, 30.0),
    ]
    .iter()
    .map(|&p| {
        let q = h.apply(p).unwrap();
        [[p.0, p.1], [q.0, q.1]]
    })
    .collect();
    let corr = dir.path().join("corr.json");
    std::fs::write(&corr, serde_json::to_string(&pts).unwrap()).unwrap();
    let est: Homography =
        serde_json::from_slice(&run_ok(&["estimate-h", "--correspondences", s(&corr)]).stdout)
            .unwrap();
    assert!(est.max_abs_diff(&h) < 1e-8);
}

#[test]
fn metrics_report() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.rgb16");
    let b = dir.path().join("b.rgb16");
    burstsynth::io::write_rgb16(
        &a,
        &common::smooth_image(32, 32, 0.0),
        burstsynth::Levels::FULL,
    )
    .unwrap();
    burstsynth::io::write_rgb16(
        &b,
        &common::smooth_image(32, 32, 0.5),
        burstsynth::Levels::FULL,
    )
    .unwrap();
    let out = run_ok(&[
        "metrics",
        "--pair",
        s(&a),
        s(&a),
        "--pair",
        s(&a),
        s(&b),
        "--workers",
        "2",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let per = report["per_image"].as_array().unwrap();
    assert_eq!(per.len(), 2);
    assert!(per[0]["psnr"].is_null());
    assert_eq!(per[0]["ssim"], 1.0);
    assert!(per[1]["psnr"].as_f64().unwrap() > 10.0);
    assert!(report["mean"]["psnr"].is_null());
}

#[test]
fn exit_codes_classify_failures() {
    let dir = tempfile::tempdir().unwrap();
    // Configuration: missing inputs directory.
    let missing = dir.path().join("nope");
    let out = run(&[
        "synthesize",
        "--inputs",
        s(&missing),
        "--output",
        s(&dir.path().join("o")),
        "--variant",
        "baseline",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Configuration: unknown flag value.
    assert_eq!(
        run(&["synthesize", "--variant", "fancy"]).status.code(),
        Some(2)
    );

    // Data: truncated RAW16.
    let raw = dir.path().join("t.raw16");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    burstsynth::io::write_bayer_frame(
        &raw,
        &common::random_frame(8, 8, CfaPattern::Rggb, common::SENSOR, &mut rng),
    )
    .unwrap();
    let bytes = std::fs::read(&raw).unwrap();
    std::fs::write(&raw, &bytes[..20]).unwrap();
    let out = run(&[
        "demosaic",
        "--input",
        s(&raw),
        "--out",
        s(&dir.path().join("x.rgb16")),
    ]);
    assert_eq!(out.status.code(), Some(3));

    // I/O: input file does not exist.
    let out = run(&[
        "demosaic",
        "--input",
        s(&missing),
        "--out",
        s(&dir.path().join("y.rgb16")),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn non_empty_output_is_refused() {
    let root = tempfile::tempdir().unwrap();
    let (inputs, motion) = common::make_inputs(root.path(), 1, 64, 6);
    let out = root.path().join("out");
    std::fs::create_dir_all(&out).unwrap();
    std::fs::write(out.join("stale"), b"x").unwrap();
    let status = run(&[
        "synthesize",
        "--inputs",
        s(&inputs),
        "--motion",
        s(&motion),
        "--output",
        s(&out),
    ])
    .status;
    assert_eq!(status.code(), Some(2));
}
