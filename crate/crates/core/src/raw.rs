//! Image containers and CFA bookkeeping.
//!
//! Everything downstream of [`RawBayerFrame::normalize`] works on `f32`
//! samples in `[0, 1]`. Storage formats re-quantize through [`Levels`], which
//! is exact for values that originated from sensor counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Color of a single CFA site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    R,
    G,
    B,
}

impl Channel {
    /// Index into an interleaved RGB triple.
    pub fn index(self) -> usize {
        match self {
            Channel::R => 0,
            Channel::G => 1,
            Channel::B => 2,
        }
    }
}

/// 2x2 Bayer tile layout, named by the colors of the tile in row-major order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum CfaPattern {
    #[default]
    #[serde(rename = "RGGB")]
    Rggb,
    #[serde(rename = "BGGR")]
    Bggr,
    #[serde(rename = "GRBG")]
    Grbg,
    #[serde(rename = "GBRG")]
    Gbrg,
}

impl CfaPattern {
    pub const ALL: [CfaPattern; 4] = [
        CfaPattern::Rggb,
        CfaPattern::Bggr,
        CfaPattern::Grbg,
        CfaPattern::Gbrg,
    ];

    fn tile(self) -> [[Channel; 2]; 2] {
        use Channel::*;
        match self {
            CfaPattern::Rggb => [[R, G], [G, B]],
            CfaPattern::Bggr => [[B, G], [G, R]],
            CfaPattern::Grbg => [[G, R], [B, G]],
            CfaPattern::Gbrg => [[G, B], [R, G]],
        }
    }

    /// Color of the sensor site at `(x, y)`.
    #[inline]
    pub fn color_at(self, x: usize, y: usize) -> Channel {
        self.tile()[y & 1][x & 1]
    }

    /// Offsets `(dx, dy)` inside the 2x2 tile of the R, G-on-R-row, G-on-B-row
    /// and B sites, in that order. This is the packed channel order.
    pub fn packed_offsets(self) -> [(usize, usize); 4] {
        let tile = self.tile();
        let find = |c: Channel| -> Vec<(usize, usize)> {
            let mut out = Vec::new();
            for (dy, row) in tile.iter().enumerate() {
                for (dx, &site) in row.iter().enumerate() {
                    if site == c {
                        out.push((dx, dy));
                    }
                }
            }
            out
        };
        let r = find(Channel::R)[0];
        let b = find(Channel::B)[0];
        let greens = find(Channel::G);
        let (gr, gb) = if greens[0].1 == r.1 {
            (greens[0], greens[1])
        } else {
            (greens[1], greens[0])
        };
        [r, gr, gb, b]
    }

    pub fn name(self) -> &'static str {
        match self {
            CfaPattern::Rggb => "RGGB",
            CfaPattern::Bggr => "BGGR",
            CfaPattern::Grbg => "GRBG",
            CfaPattern::Gbrg => "GBRG",
        }
    }
}

impl std::str::FromStr for CfaPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RGGB" => Ok(CfaPattern::Rggb),
            "BGGR" => Ok(CfaPattern::Bggr),
            "GRBG" => Ok(CfaPattern::Grbg),
            "GBRG" => Ok(CfaPattern::Gbrg),
            other => Err(Error::InvalidArgument(format!(
                "unknown CFA pattern {other:?}"
            ))),
        }
    }
}

/// Black and white sensor levels; defines the mapping between 16-bit counts
/// and normalized `[0, 1]` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Levels {
    pub black: u16,
    pub white: u16,
}

impl Levels {
    /// Full 16-bit range, used for synthetic data and ground truth.
    pub const FULL: Levels = Levels {
        black: 0,
        white: u16::MAX,
    };

    pub fn new(black: u16, white: u16) -> Result<Self> {
        let levels = Levels { black, white };
        levels.validate()?;
        Ok(levels)
    }

    pub fn validate(&self) -> Result<()> {
        if self.black >= self.white {
            return Err(Error::InvalidLevels {
                black: self.black,
                white: self.white,
            });
        }
        Ok(())
    }

    #[inline]
    fn range(&self) -> f64 {
        f64::from(self.white) - f64::from(self.black)
    }

    /// `clamp((count - black) / (white - black), 0, 1)`.
    #[inline]
    pub fn normalize(&self, count: u16) -> f32 {
        let v = (f64::from(count) - f64::from(self.black)) / self.range();
        v.clamp(0.0, 1.0) as f32
    }

    /// Inverse of [`Levels::normalize`], clamping to `[0, 1]` first.
    #[inline]
    pub fn quantize(&self, value: f32) -> u16 {
        let v = if value.is_nan() {
            0.0
        } else {
            f64::from(value).clamp(0.0, 1.0)
        };
        (v * self.range() + f64::from(self.black)).round() as u16
    }

    /// Snap a value onto the storage grid. Idempotent, and the identity on
    /// values produced by [`Levels::normalize`].
    #[inline]
    pub fn snap(&self, value: f32) -> f32 {
        self.normalize(self.quantize(value))
    }
}

impl Default for Levels {
    fn default() -> Self {
        Levels::FULL
    }
}

fn check_even(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(Error::InvalidDimensions {
            width,
            height,
            reason: "width and height must be positive and even",
        });
    }
    Ok(())
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::ShapeMismatch(format!(
            "expected {expected} samples, found {found}"
        )));
    }
    Ok(())
}

/// Single-channel sensor mosaic in raw counts.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBayerFrame {
    width: usize,
    height: usize,
    cfa: CfaPattern,
    levels: Levels,
    data: Vec<u16>,
}

impl RawBayerFrame {
    pub fn new(
        width: usize,
        height: usize,
        cfa: CfaPattern,
        levels: Levels,
        data: Vec<u16>,
    ) -> Result<Self> {
        check_even(width, height)?;
        check_len(width * height, data.len())?;
        levels.validate()?;
        Ok(RawBayerFrame {
            width,
            height,
            cfa,
            levels,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cfa(&self) -> CfaPattern {
        self.cfa
    }

    pub fn levels(&self) -> Levels {
        self.levels
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    /// Map counts to `[0, 1]` using the frame's black and white levels.
    pub fn normalize(&self) -> BayerPlane {
        let levels = self.levels;
        BayerPlane {
            width: self.width,
            height: self.height,
            cfa: self.cfa,
            data: self.data.iter().map(|&s| levels.normalize(s)).collect(),
        }
    }
}

/// Normalized single-channel mosaic.
#[derive(Debug, Clone, PartialEq)]
pub struct BayerPlane {
    width: usize,
    height: usize,
    cfa: CfaPattern,
    data: Vec<f32>,
}

impl BayerPlane {
    pub fn new(width: usize, height: usize, cfa: CfaPattern, data: Vec<f32>) -> Result<Self> {
        check_even(width, height)?;
        check_len(width * height, data.len())?;
        Ok(BayerPlane {
            width,
            height,
            cfa,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cfa(&self) -> CfaPattern {
        self.cfa
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    /// Snap every sample onto the storage grid of `levels`.
    pub fn snapped(&self, levels: Levels) -> BayerPlane {
        BayerPlane {
            width: self.width,
            height: self.height,
            cfa: self.cfa,
            data: self.data.iter().map(|&v| levels.snap(v)).collect(),
        }
    }

    /// Re-quantize to counts, e.g. for serialization.
    pub fn to_raw(&self, levels: Levels) -> RawBayerFrame {
        RawBayerFrame {
            width: self.width,
            height: self.height,
            cfa: self.cfa,
            levels,
            data: self.data.iter().map(|&v| levels.quantize(v)).collect(),
        }
    }

    /// Crop a CFA-aligned window; `x` and `y` must be even so the pattern is kept.
    pub fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<Self> {
        if !x.is_multiple_of(2) || !y.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "mosaic crop origin ({x}, {y}) must be even"
            )));
        }
        check_even(width, height)?;
        if x + width > self.width || y + height > self.height {
            return Err(Error::InvalidArgument(format!(
                "crop {width}x{height}+{x}+{y} outside {}x{} mosaic",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(width * height);
        for row in y..y + height {
            let start = row * self.width + x;
            data.extend_from_slice(&self.data[start..start + width]);
        }
        Ok(BayerPlane {
            width,
            height,
            cfa: self.cfa,
            data,
        })
    }
}

/// Interleaved three-channel linear image.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "image must not be empty",
            });
        }
        check_len(width * height * 3, data.len())?;
        Ok(RgbImage {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [f32; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        RgbImage {
            width,
            height,
            data,
        }
    }

    /// Build an image from a per-pixel function.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f32; 3],
    ) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        RgbImage {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f32; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, rgb: [f32; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn same_shape(&self, other: &RgbImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || x + width > self.width || y + height > self.height {
            return Err(Error::InvalidArgument(format!(
                "crop {width}x{height}+{x}+{y} outside {}x{} image",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(width * height * 3);
        for row in y..y + height {
            let start = (row * self.width + x) * 3;
            data.extend_from_slice(&self.data[start..start + width * 3]);
        }
        Ok(RgbImage {
            width,
            height,
            data,
        })
    }

    /// Snap every sample onto the storage grid of `levels`.
    pub fn snapped(&self, levels: Levels) -> RgbImage {
        RgbImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| levels.snap(v)).collect(),
        }
    }

    pub fn clamped(&self) -> RgbImage {
        RgbImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        }
    }
}

/// Half-resolution four-channel packing of a Bayer mosaic. Channels are
/// stored planar in the order R, G (R row), G (B row), B.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedRaw4 {
    width: usize,
    height: usize,
    cfa: CfaPattern,
    data: Vec<f32>,
}

impl PackedRaw4 {
    pub const CHANNELS: usize = 4;

    pub fn new(width: usize, height: usize, cfa: CfaPattern, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "packed frame must not be empty",
            });
        }
        check_len(width * height * Self::CHANNELS, data.len())?;
        Ok(PackedRaw4 {
            width,
            height,
            cfa,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Pattern of the mosaic this frame unpacks to.
    pub fn cfa(&self) -> CfaPattern {
        self.cfa
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || x + width > self.width || y + height > self.height {
            return Err(Error::InvalidArgument(format!(
                "crop {width}x{height}+{x}+{y} outside {}x{} packed frame",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(width * height * Self::CHANNELS);
        for c in 0..Self::CHANNELS {
            let plane = self.channel(c);
            for row in y..y + height {
                let start = row * self.width + x;
                data.extend_from_slice(&plane[start..start + width]);
            }
        }
        Ok(PackedRaw4 {
            width,
            height,
            cfa: self.cfa,
            data,
        })
    }
}

/// Sample an RGB image through a CFA; no filtering.
pub fn mosaic(image: &RgbImage, cfa: CfaPattern) -> Result<BayerPlane> {
    check_even(image.width, image.height)?;
    let mut data = Vec::with_capacity(image.width * image.height);
    for y in 0..image.height {
        for x in 0..image.width {
            let c = cfa.color_at(x, y).index();
            data.push(image.data[(y * image.width + x) * 3 + c]);
        }
    }
    Ok(BayerPlane {
        width: image.width,
        height: image.height,
        cfa,
        data,
    })
}

pub fn pack_raw4(plane: &BayerPlane) -> PackedRaw4 {
    let (w, h) = (plane.width / 2, plane.height / 2);
    let offsets = plane.cfa.packed_offsets();
    let mut data = vec![0.0f32; w * h * 4];
    for (c, &(dx, dy)) in offsets.iter().enumerate() {
        let dst = &mut data[c * w * h..(c + 1) * w * h];
        for ty in 0..h {
            let src_row = (2 * ty + dy) * plane.width;
            for tx in 0..w {
                dst[ty * w + tx] = plane.data[src_row + 2 * tx + dx];
            }
        }
    }
    PackedRaw4 {
        width: w,
        height: h,
        cfa: plane.cfa,
        data,
    }
}

pub fn unpack_raw4(packed: &PackedRaw4) -> BayerPlane {
    let (w, h) = (packed.width * 2, packed.height * 2);
    let offsets = packed.cfa.packed_offsets();
    let mut data = vec![0.0f32; w * h];
    for (c, &(dx, dy)) in offsets.iter().enumerate() {
        let src = packed.channel(c);
        for ty in 0..packed.height {
            let dst_row = (2 * ty + dy) * w;
            for tx in 0..packed.width {
                data[dst_row + 2 * tx + dx] = src[ty * packed.width + tx];
            }
        }
    }
    BayerPlane {
        width: w,
        height: h,
        cfa: packed.cfa,
        data,
    }
}
