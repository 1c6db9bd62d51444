use serde::{Deserialize, Serialize};

use super::Homography;
use crate::error::{Error, Result};

/// Moments of the motion at one frame index across bursts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameStats {
    /// 1-based frame index; 1 is the base frame.
    pub index: usize,
    pub count: usize,
    pub mean_tx: f64,
    pub mean_ty: f64,
    pub var_tx: f64,
    pub var_ty: f64,
    pub mean_rotation: f64,
    pub var_rotation: f64,
}

/// Summary statistics of a set of burst trajectories.
///
/// Lag-1 autocorrelations are Pearson correlations of consecutive-frame
/// pairs pooled over all bursts. They are 0 when either side has no
/// variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub bursts: usize,
    pub per_frame: Vec<FrameStats>,
    pub lag1_autocorr_tx: f64,
    pub lag1_autocorr_ty: f64,
    /// Mean of the two translation autocorrelations.
    pub lag1_autocorr_translation: f64,
}

fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

fn pearson(pairs: &[(f64, f64)]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    let denom = (sxx * syy).sqrt();
    // Scale-aware zero test so constant series report 0 rather than noise.
    let scale = pairs
        .iter()
        .map(|p| p.0.abs().max(p.1.abs()))
        .fold(0.0, f64::max);
    if denom <= 1e-24 * scale.max(1.0).powi(2) * n {
        0.0
    } else {
        (sxy / denom).clamp(-1.0, 1.0)
    }
}

pub fn trajectory_stats(bursts: &[Vec<Homography>]) -> Result<TrajectoryStats> {
    if bursts.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "trajectory statistics need at least 2 bursts, got {}",
            bursts.len()
        )));
    }
    let max_len = bursts.iter().map(Vec::len).max().unwrap_or(0);
    let mut per_frame = Vec::with_capacity(max_len);
    for k in 0..max_len {
        let hs: Vec<&Homography> = bursts.iter().filter_map(|b| b.get(k)).collect();
        let tx: Vec<f64> = hs.iter().map(|h| h.translation_part().0).collect();
        let ty: Vec<f64> = hs.iter().map(|h| h.translation_part().1).collect();
        let rot: Vec<f64> = hs.iter().map(|h| h.rotation_angle()).collect();
        let (mean_tx, var_tx) = mean_var(&tx);
        let (mean_ty, var_ty) = mean_var(&ty);
        let (mean_rotation, var_rotation) = mean_var(&rot);
        per_frame.push(FrameStats {
            index: k + 1,
            count: hs.len(),
            mean_tx,
            mean_ty,
            var_tx,
            var_ty,
            mean_rotation,
            var_rotation,
        });
    }

    let lag_pairs = |component: fn(&Homography) -> f64| -> Vec<(f64, f64)> {
        bursts
            .iter()
            .flat_map(|b| {
                b.windows(2)
                    .map(move |w| (component(&w[0]), component(&w[1])))
            })
            .collect()
    };
    let lag1_autocorr_tx = pearson(&lag_pairs(|h| h.translation_part().0));
    let lag1_autocorr_ty = pearson(&lag_pairs(|h| h.translation_part().1));
    Ok(TrajectoryStats {
        bursts: bursts.len(),
        per_frame,
        lag1_autocorr_tx,
        lag1_autocorr_ty,
        lag1_autocorr_translation: 0.5 * (lag1_autocorr_tx + lag1_autocorr_ty),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::sample_uniform_motion;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_bursts_are_all_zero() {
        let bursts = vec![vec![Homography::identity(); 8]; 5];
        let s = trajectory_stats(&bursts).unwrap();
        assert_eq!(s.per_frame.len(), 8);
        for f in &s.per_frame {
            assert_eq!(
                (f.mean_tx, f.mean_ty, f.var_tx, f.var_ty, f.var_rotation),
                (0.0, 0.0, 0.0, 0.0, 0.0)
            );
        }
        assert_eq!(s.lag1_autocorr_translation, 0.0);
    }

    #[test]
    fn linear_drift_is_strongly_autocorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bursts: Vec<Vec<Homography>> = (0..200)
            .map(|_| {
                let (dx, dy) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                (0..8)
                    .map(|i| Homography::translation(i as f64 * dx, i as f64 * dy))
                    .collect()
            })
            .collect();
        let s = trajectory_stats(&bursts).unwrap();
        assert!(
            (s.lag1_autocorr_tx - 1.0).abs() < 0.05,
            "{}",
            s.lag1_autocorr_tx
        );
        assert!(
            (s.lag1_autocorr_ty - 1.0).abs() < 0.05,
            "{}",
            s.lag1_autocorr_ty
        );
        // Variance grows with the frame index under drift.
        assert!(s.per_frame[7].var_tx > s.per_frame[2].var_tx);
    }

    #[test]
    fn independent_uniform_motion_is_uncorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let bursts: Vec<Vec<Homography>> = (0..1000)
            .map(|_| sample_uniform_motion(4.0, 0.01, 8, &mut rng).unwrap())
            .collect();
        let s = trajectory_stats(&bursts).unwrap();
        assert!(s.lag1_autocorr_tx.abs() < 0.1);
        assert!(s.lag1_autocorr_ty.abs() < 0.1);
        assert!(s.per_frame[3].var_rotation > 0.0);
    }

    #[test]
    fn needs_two_bursts() {
        assert!(trajectory_stats(&[vec![Homography::identity()]]).is_err());
    }
}
