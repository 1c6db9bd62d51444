//! On-disk dataset layout:
//!
//! ```text
//! manifest.json
//! sample_00000/frame_00.raw4  frame_00.raw4.json  ...  gt.rgb16  gt.rgb16.json  meta.json
//! ```
//!
//! Every file is listed in the manifest with its SHA-256. Reading checks the
//! format version, then file sizes against their sidecars, then checksums.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{BurstSample, SampleMeta};
use crate::error::{Error, Result};
use crate::io::{
    decode_samples, encode_sidecar, encode_u16, packed_from_samples, packed_sidecar,
    quantize_packed, quantize_rgb, rgb_from_samples, rgb_sidecar, Sidecar,
};

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    /// Sample directories in iteration order.
    pub samples: Vec<String>,
    /// Relative path (with `/`) to lowercase hex SHA-256.
    pub files: BTreeMap<String, String>,
    /// Free-form run provenance (config hash, seeds, versions).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<serde_json::Value>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn sample_dir_name(index: usize) -> String {
    format!("sample_{index:05}")
}

fn frame_name(index: usize) -> String {
    format!("frame_{index:02}.raw4")
}

fn to_json<T: Serialize>(value: &T) -> String {
    // Only plain data types go through here; serialization cannot fail.
    serde_json::to_string_pretty(value).expect("JSON serialization") + "\n"
}

/// Incremental dataset writer. Samples are committed in call order.
#[derive(Debug)]
pub struct DatasetWriter {
    root: PathBuf,
    manifest: DatasetManifest,
}

impl DatasetWriter {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(DatasetWriter {
            root: root.to_path_buf(),
            manifest: DatasetManifest {
                format_version: FORMAT_VERSION,
                samples: Vec::new(),
                files: BTreeMap::new(),
                run: None,
            },
        })
    }

    fn put(&mut self, rel: String, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(&rel);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.manifest.files.insert(rel, sha256_hex(bytes));
        Ok(())
    }

    pub fn add(&mut self, sample: &BurstSample) -> Result<()> {
        sample.validate()?;
        let name = sample_dir_name(self.manifest.samples.len());
        let dir = self.root.join(&name);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

        let lr_levels = sample.meta.lr_levels;
        for (i, frame) in sample.lr_frames.iter().enumerate() {
            let rel = format!("{name}/{}", frame_name(i));
            self.put(
                format!("{rel}.json"),
                encode_sidecar(&packed_sidecar(frame, lr_levels)).as_bytes(),
            )?;
            self.put(rel, &encode_u16(&quantize_packed(frame, lr_levels)))?;
        }
        let gt_levels = sample.meta.gt_levels;
        let rel = format!("{name}/gt.rgb16");
        self.put(
            format!("{rel}.json"),
            encode_sidecar(&rgb_sidecar(&sample.hr_gt, gt_levels)).as_bytes(),
        )?;
        self.put(rel, &encode_u16(&quantize_rgb(&sample.hr_gt, gt_levels)))?;
        self.put(
            format!("{name}/meta.json"),
            to_json(&sample.meta).as_bytes(),
        )?;
        self.manifest.samples.push(name);
        Ok(())
    }

    pub fn finish(mut self, run: Option<serde_json::Value>) -> Result<DatasetManifest> {
        self.manifest.run = run;
        let path = self.root.join(MANIFEST_FILE);
        std::fs::write(&path, to_json(&self.manifest)).map_err(|e| Error::io(&path, e))?;
        Ok(self.manifest)
    }
}

pub fn write_dataset(
    samples: &[BurstSample],
    root: &Path,
    run: Option<serde_json::Value>,
) -> Result<DatasetManifest> {
    let mut writer = DatasetWriter::create(root)?;
    for sample in samples {
        writer.add(sample)?;
    }
    writer.finish(run)
}

pub fn read_manifest(root: &Path) -> Result<DatasetManifest> {
    let path = root.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    // Check the version before trusting the rest of the schema.
    let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::json(&path, e))?;
    let found = raw
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::Malformed {
            path: path.clone(),
            reason: "missing format_version".into(),
        })?;
    if found != u64::from(FORMAT_VERSION) {
        return Err(Error::VersionMismatch {
            found: u32::try_from(found).unwrap_or(u32::MAX),
            expected: FORMAT_VERSION,
        });
    }
    serde_json::from_value(raw).map_err(|e| Error::json(&path, e))
}

struct Verified<'a> {
    root: &'a Path,
    manifest: &'a DatasetManifest,
}

impl Verified<'_> {
    fn read(&self, rel: &str) -> Result<(PathBuf, Vec<u8>)> {
        let path = self.root.join(rel);
        let expected = self
            .manifest
            .files
            .get(rel)
            .ok_or_else(|| Error::Malformed {
                path: path.clone(),
                reason: "file not listed in manifest".into(),
            })?;
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if &sha256_hex(&bytes) != expected {
            return Err(Error::ChecksumMismatch { path });
        }
        Ok((path, bytes))
    }

    fn json<T: for<'de> Deserialize<'de>>(&self, rel: &str) -> Result<T> {
        let (path, bytes) = self.read(rel)?;
        serde_json::from_slice(&bytes).map_err(|e| Error::json(&path, e))
    }

    /// Sidecar-described data file: size first, then checksum.
    fn samples(&self, rel: &str) -> Result<(Sidecar, Vec<u16>)> {
        let sidecar: Sidecar = self.json(&format!("{rel}.json"))?;
        let path = self.root.join(rel);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let expected = (sidecar.sample_count() * 2) as u64;
        if (bytes.len() as u64) < expected {
            return Err(Error::Truncated {
                path,
                expected,
                found: bytes.len() as u64,
            });
        }
        let (path, bytes) = self.read(rel)?;
        let samples = decode_samples(&path, &sidecar, &bytes)?;
        Ok((sidecar, samples))
    }
}

pub fn read_dataset(root: &Path) -> Result<Vec<BurstSample>> {
    let manifest = read_manifest(root)?;
    let v = Verified {
        root,
        manifest: &manifest,
    };
    manifest
        .samples
        .iter()
        .map(|name| {
            let meta: SampleMeta = v.json(&format!("{name}/meta.json"))?;
            let lr_frames = (0..meta.homographies.len())
                .map(|i| {
                    let (sidecar, samples) = v.samples(&format!("{name}/{}", frame_name(i)))?;
                    packed_from_samples(&sidecar, &samples)
                })
                .collect::<Result<Vec<_>>>()?;
            let (sidecar, samples) = v.samples(&format!("{name}/gt.rgb16"))?;
            let sample = BurstSample {
                lr_frames,
                hr_gt: rgb_from_samples(&sidecar, &samples)?,
                meta,
            };
            sample.validate()?;
            Ok(sample)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::Homography;
    use crate::raw::{CfaPattern, Levels, PackedRaw4, RgbImage};
    use crate::synth::{NoiseParams, Variant};

    fn sample(k: u16) -> BurstSample {
        let lr = Levels::new(64, 1023).unwrap();
        let packed = PackedRaw4::new(
            2,
            2,
            CfaPattern::Rggb,
            (0..16).map(|i| lr.normalize(64 + k + i * 50)).collect(),
        )
        .unwrap();
        let gt = RgbImage::from_fn(8, 8, |x, y| {
            let v = Levels::FULL.normalize((x * 997 + y * 131 + usize::from(k)) as u16);
            [v, v * 0.5, 1.0 - v]
        })
        .snapped(Levels::FULL);
        BurstSample {
            lr_frames: vec![packed.clone(), packed],
            hr_gt: gt,
            meta: SampleMeta {
                scene_id: format!("scene{k}"),
                variant: Variant::Baseline,
                homographies: vec![
                    Homography::identity(),
                    Homography::rotation(0.1 + f64::from(k) * 1e-3),
                ],
                noise: Some(NoiseParams {
                    shot_gain: 0.003_141_592_653_589_793,
                    read_sigma: 0.01,
                    seed: 99,
                }),
                seed: Some(u64::MAX),
                lr_levels: lr,
                gt_levels: Levels::FULL,
                margin_lr: 0,
                lr_origin: [0, 0],
                hr_origin: [0, 0],
            },
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let samples = vec![sample(0), sample(7)];
        write_dataset(&samples, dir.path(), None).unwrap();
        assert_eq!(read_dataset(dir.path()).unwrap(), samples);
    }

    #[test]
    fn corrupted_frame_names_file() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&[sample(1)], dir.path(), None).unwrap();
        let path = dir.path().join("sample_00000/frame_01.raw4");
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[5] ^= 0x40;
        std::fs::write(&path, bytes).unwrap();
        match read_dataset(dir.path()) {
            Err(Error::ChecksumMismatch { path: p }) => assert_eq!(p, path),
            other => panic!("expected checksum error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_frame_detected() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&[sample(1)], dir.path(), None).unwrap();
        let path = dir.path().join("sample_00000/gt.rgb16");
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..10]).unwrap();
        assert!(matches!(
            read_dataset(dir.path()),
            Err(Error::Truncated { .. })
        ));
    }

    #[test]
    fn version_mismatch_detected() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&[sample(1)], dir.path(), None).unwrap();
        let path = dir.path().join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(
            &path,
            text.replace("\"format_version\": 1", "\"format_version\": 2"),
        )
        .unwrap();
        assert!(matches!(
            read_dataset(dir.path()),
            Err(Error::VersionMismatch {
                found: 2,
                expected: 1
            })
        ));
    }

    #[test]
    fn layout_is_deterministic() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let samples = vec![sample(3), sample(4)];
        let ma = write_dataset(&samples, a.path(), None).unwrap();
        let mb = write_dataset(&samples, b.path(), None).unwrap();
        assert_eq!(ma, mb);
        assert_eq!(
            std::fs::read(a.path().join(MANIFEST_FILE)).unwrap(),
            std::fs::read(b.path().join(MANIFEST_FILE)).unwrap()
        );
    }
}
