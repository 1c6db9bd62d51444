//! Synthesis of aligned low-/high-resolution RAW burst pairs for multi-frame
//! super-resolution.
//!
//! The crate is organised bottom-up:
//!
//! - [`raw`]: image containers, CFA handling, normalization, mosaic/packing.
//! - [`demosaic`]: the nearest-neighbor color-difference demosaic.
//! - [`resample`]: 2x downsampling and bilinear perspective warping.
//! - [`io`]: RAW16 / RGB16 files with JSON sidecars.
//! - [`motion`]: homography algebra, DLT estimation, empirical and uniform
//!   motion sampling, trajectory statistics.
//! - [`synth`]: ground-truth fusion, the two burst pipelines, patching and
//!   dataset persistence.
//! - [`metrics`]: PSNR, SSIM and MS-SSIM.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod demosaic;
pub mod error;
pub mod io;
pub mod metrics;
pub mod motion;
pub mod raw;
pub mod resample;
pub mod synth;

pub use error::{Error, Result};
pub use motion::Homography;
pub use raw::{BayerPlane, CfaPattern, Channel, Levels, PackedRaw4, RawBayerFrame, RgbImage};
