//! RAW16 files: little-endian `u16` samples, row-major, with a JSON sidecar
//! at `<file>.json` holding the geometry and levels.
//!
//! Multi-channel data is interleaved per pixel for RGB (`channels: 3`) and
//! planar per channel for packed RAW (`channels: 4`).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raw::{CfaPattern, Levels, PackedRaw4, RawBayerFrame, RgbImage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub width: usize,
    pub height: usize,
    #[serde(default = "one")]
    pub channels: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfa: Option<CfaPattern>,
    pub black_level: u16,
    pub white_level: u16,
    /// Relative exposure of the capture, used when fusing ground truth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exposure_scale: Option<f64>,
}

fn one() -> usize {
    1
}

impl Sidecar {
    pub fn levels(&self) -> Result<Levels> {
        Levels::new(self.black_level, self.white_level)
    }

    pub fn sample_count(&self) -> usize {
        self.width * self.height * self.channels
    }

    fn expect_channels(&self, path: &Path, channels: usize) -> Result<()> {
        if self.channels != channels {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                reason: format!(
                    "expected {channels} channel(s), sidecar says {}",
                    self.channels
                ),
            });
        }
        Ok(())
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn encode_u16(samples: &[u16]) -> Vec<u8> {
    samples.iter().flat_map(|s| s.to_le_bytes()).collect()
}

pub fn decode_u16(bytes: &[u8]) -> Vec<u16> {
    bytes
        .chunks_exact(2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .collect()
}

pub fn encode_sidecar(sidecar: &Sidecar) -> String {
    // Serializing a plain struct of numbers cannot fail.
    serde_json::to_string_pretty(sidecar).expect("sidecar serialization") + "\n"
}

/// Parse samples from `bytes` against the geometry in `sidecar`.
pub fn decode_samples(path: &Path, sidecar: &Sidecar, bytes: &[u8]) -> Result<Vec<u16>> {
    let expected = (sidecar.sample_count() * 2) as u64;
    let found = bytes.len() as u64;
    if found < expected {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
            expected,
            found,
        });
    }
    if found > expected {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            reason: format!("{} trailing bytes", found - expected),
        });
    }
    Ok(decode_u16(bytes))
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let side = sidecar_path(path);
    let text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(&side, e))
}

pub fn write_raw16(path: &Path, sidecar: &Sidecar, samples: &[u16]) -> Result<()> {
    if samples.len() != sidecar.sample_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} samples for a {}x{}x{} sidecar",
            samples.len(),
            sidecar.width,
            sidecar.height,
            sidecar.channels
        )));
    }
    std::fs::write(path, encode_u16(samples)).map_err(|e| Error::io(path, e))?;
    let side = sidecar_path(path);
    std::fs::write(&side, encode_sidecar(sidecar)).map_err(|e| Error::io(&side, e))
}

pub fn read_raw16(path: &Path) -> Result<(Sidecar, Vec<u16>)> {
    let sidecar = read_sidecar(path)?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let samples = decode_samples(path, &sidecar, &bytes)?;
    Ok((sidecar, samples))
}

pub fn write_bayer_frame(path: &Path, frame: &RawBayerFrame) -> Result<()> {
    let sidecar = Sidecar {
        width: frame.width(),
        height: frame.height(),
        channels: 1,
        cfa: Some(frame.cfa()),
        black_level: frame.levels().black,
        white_level: frame.levels().white,
        exposure_scale: None,
    };
    write_raw16(path, &sidecar, frame.data())
}

pub fn read_bayer_frame(path: &Path) -> Result<(RawBayerFrame, Sidecar)> {
    let (sidecar, samples) = read_raw16(path)?;
    sidecar.expect_channels(path, 1)?;
    let cfa = sidecar.cfa.unwrap_or_default();
    let frame = RawBayerFrame::new(
        sidecar.width,
        sidecar.height,
        cfa,
        sidecar.levels()?,
        samples,
    )?;
    Ok((frame, sidecar))
}

pub fn rgb_sidecar(image: &RgbImage, levels: Levels) -> Sidecar {
    Sidecar {
        width: image.width(),
        height: image.height(),
        channels: 3,
        cfa: None,
        black_level: levels.black,
        white_level: levels.white,
        exposure_scale: None,
    }
}

pub fn quantize_rgb(image: &RgbImage, levels: Levels) -> Vec<u16> {
    image.data().iter().map(|&v| levels.quantize(v)).collect()
}

pub fn write_rgb16(path: &Path, image: &RgbImage, levels: Levels) -> Result<()> {
    write_raw16(
        path,
        &rgb_sidecar(image, levels),
        &quantize_rgb(image, levels),
    )
}

pub fn rgb_from_samples(sidecar: &Sidecar, samples: &[u16]) -> Result<RgbImage> {
    let levels = sidecar.levels()?;
    RgbImage::new(
        sidecar.width,
        sidecar.height,
        samples.iter().map(|&s| levels.normalize(s)).collect(),
    )
}

pub fn read_rgb16(path: &Path) -> Result<(RgbImage, Levels)> {
    let (sidecar, samples) = read_raw16(path)?;
    sidecar.expect_channels(path, 3)?;
    Ok((rgb_from_samples(&sidecar, &samples)?, sidecar.levels()?))
}

pub fn packed_sidecar(packed: &PackedRaw4, levels: Levels) -> Sidecar {
    Sidecar {
        width: packed.width(),
        height: packed.height(),
        channels: PackedRaw4::CHANNELS,
        cfa: Some(packed.cfa()),
        black_level: levels.black,
        white_level: levels.white,
        exposure_scale: None,
    }
}

pub fn quantize_packed(packed: &PackedRaw4, levels: Levels) -> Vec<u16> {
    packed.data().iter().map(|&v| levels.quantize(v)).collect()
}

pub fn packed_from_samples(sidecar: &Sidecar, samples: &[u16]) -> Result<PackedRaw4> {
    let levels = sidecar.levels()?;
    PackedRaw4::new(
        sidecar.width,
        sidecar.height,
        sidecar.cfa.unwrap_or_default(),
        samples.iter().map(|&s| levels.normalize(s)).collect(),
    )
}

pub fn write_packed(path: &Path, packed: &PackedRaw4, levels: Levels) -> Result<()> {
    write_raw16(
        path,
        &packed_sidecar(packed, levels),
        &quantize_packed(packed, levels),
    )
}

pub fn read_packed(path: &Path) -> Result<(PackedRaw4, Levels)> {
    let (sidecar, samples) = read_raw16(path)?;
    sidecar.expect_channels(path, PackedRaw4::CHANNELS)?;
    Ok((packed_from_samples(&sidecar, &samples)?, sidecar.levels()?))
}
