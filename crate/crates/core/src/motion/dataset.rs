use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Homography;
use crate::error::{Error, Result};

/// One harvested handheld burst. `frames[k]` maps the base frame to frame
/// index `k + 2`; frame index 1 is the base frame itself and is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionCapture {
    pub id: String,
    pub frames: Vec<Homography>,
}

impl MotionCapture {
    /// Number of frames including the implicit base frame.
    pub fn frame_count(&self) -> usize {
        self.frames.len() + 1
    }

    /// Full burst motion, base frame first.
    pub fn burst(&self) -> Vec<Homography> {
        std::iter::once(Homography::identity())
            .chain(self.frames.iter().copied())
            .collect()
    }
}

/// Empirical handheld motion, immutable once loaded.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MotionDataset {
    pub captures: Vec<MotionCapture>,
}

impl MotionDataset {
    pub fn new(captures: Vec<MotionCapture>) -> Self {
        MotionDataset { captures }
    }

    /// Build from full bursts whose first element is the base frame.
    pub fn from_bursts(bursts: &[Vec<Homography>]) -> Result<Self> {
        let captures = bursts
            .iter()
            .enumerate()
            .map(|(i, burst)| match burst.split_first() {
                Some((base, rest)) if base.is_identity() => Ok(MotionCapture {
                    id: format!("burst_{i:05}"),
                    frames: rest.to_vec(),
                }),
                Some(_) => Err(Error::InvalidArgument(format!(
                    "burst {i} does not start with the identity"
                ))),
                None => Err(Error::InvalidArgument(format!("burst {i} is empty"))),
            })
            .collect::<Result<_>>()?;
        Ok(MotionDataset { captures })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::json(path, e))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn is_empty(&self) -> bool {
        self.captures.is_empty()
    }

    pub fn len(&self) -> usize {
        self.captures.len()
    }

    /// Homographies observed at a 1-based frame index (index 1 is the base).
    pub fn bucket(&self, frame_index: usize) -> Vec<&Homography> {
        if frame_index < 2 {
            return Vec::new();
        }
        self.captures
            .iter()
            .filter_map(|c| c.frames.get(frame_index - 2))
            .collect()
    }

    pub fn bursts(&self) -> Vec<Vec<Homography>> {
        self.captures.iter().map(MotionCapture::burst).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_schema_round_trip() {
        let text = r#"{"captures":[{"id":"a","frames":[[[1,0,2],[0,1,0],[0,0,1]],[[1,0,3],[0,1,1],[0,0,1]]]},
                       {"id":"b","frames":[[[1,0,-1],[0,1,0],[0,0,1]]]}]}"#;
        let ds: MotionDataset = serde_json::from_str(text).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.captures[0].frame_count(), 3);
        assert_eq!(ds.bucket(2).len(), 2);
        assert_eq!(ds.bucket(3).len(), 1);
        assert!(ds.bucket(4).is_empty());
        assert!(ds.bursts()[1][0].is_identity());
        let again: MotionDataset =
            serde_json::from_str(&serde_json::to_string(&ds).unwrap()).unwrap();
        assert_eq!(again, ds);
    }

    #[test]
    fn singular_frames_rejected_on_load() {
        let text = r#"{"captures":[{"id":"a","frames":[[[0,0,0],[0,0,0],[0,0,1]]]}]}"#;
        assert!(serde_json::from_str::<MotionDataset>(text).is_err());
    }

    #[test]
    fn bursts_must_start_at_identity() {
        let bad = vec![vec![Homography::translation(1.0, 0.0)]];
        assert!(MotionDataset::from_bursts(&bad).is_err());
    }
}
