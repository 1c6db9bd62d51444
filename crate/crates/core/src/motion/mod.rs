//! Global camera motion: homographies, their estimation, and the two motion
//! models used to synthesize bursts.
//!
//! Homographies act on pixel coordinates relative to the frame center when
//! used for warping, so a pure rotation here turns the frame about its
//! middle. Harvested homographies are stored at the resolution of the capture
//! they came from; use [`Homography::rescaled`] to move them to another
//! resolution.

mod dataset;
mod dlt;
mod homography;
mod sampling;
mod stats;

pub use dataset::{MotionCapture, MotionDataset};
pub use dlt::{estimate_dlt, load_correspondences, Correspondence, MAX_CONDITION};
pub use homography::{Homography, DET_EPS};
pub use sampling::{sample_burst_motion, sample_uniform_motion};
pub use stats::{trajectory_stats, FrameStats, TrajectoryStats};
