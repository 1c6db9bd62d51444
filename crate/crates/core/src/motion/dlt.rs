use std::path::Path;

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use super::Homography;
use crate::error::{Error, Result};

/// Reject normalized design matrices whose rank-8 condition number exceeds this.
pub const MAX_CONDITION: f64 = 1e8;

/// A point in the source frame and its image in the target frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correspondence(pub [f64; 2], pub [f64; 2]);

impl Correspondence {
    pub fn new(src: (f64, f64), dst: (f64, f64)) -> Self {
        Correspondence([src.0, src.1], [dst.0, dst.1])
    }
}

/// Read a JSON list of `[[x, y], [x', y']]` pairs.
pub fn load_correspondences(path: &Path) -> Result<Vec<Correspondence>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}

/// Hartley normalization: centroid to the origin, mean distance sqrt(2).
fn normalizing_transform(points: &[[f64; 2]]) -> Result<Matrix3<f64>> {
    let n = points.len() as f64;
    let (cx, cy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p[0], sy + p[1]));
    let (cx, cy) = (cx / n, cy / n);
    let mean_dist = points
        .iter()
        .map(|p| ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt())
        .sum::<f64>()
        / n;
    if !(mean_dist > f64::EPSILON * (1.0 + cx.abs().max(cy.abs()))) {
        return Err(Error::DegenerateConfiguration(
            "points coincide; cannot normalize".into(),
        ));
    }
    let s = std::f64::consts::SQRT_2 / mean_dist;
    Ok(Matrix3::new(
        s,
        0.0,
        -s * cx,
        0.0,
        s,
        -s * cy,
        0.0,
        0.0,
        1.0,
    ))
}

/// Normalized direct linear transform. Exact for four points in general
/// position, least squares for more.
pub fn estimate_dlt(correspondences: &[Correspondence]) -> Result<Homography> {
    let n = correspondences.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 correspondences, got {n}"
        )));
    }
    if correspondences
        .iter()
        .any(|c| c.0.iter().chain(c.1.iter()).any(|v| !v.is_finite()))
    {
        return Err(Error::InvalidArgument("non-finite correspondence".into()));
    }
    let src: Vec<[f64; 2]> = correspondences.iter().map(|c| c.0).collect();
    let dst: Vec<[f64; 2]> = correspondences.iter().map(|c| c.1).collect();
    let t_src = normalizing_transform(&src)?;
    let t_dst = normalizing_transform(&dst)?;
    let norm = |t: &Matrix3<f64>, p: [f64; 2]| {
        (t[(0, 0)] * p[0] + t[(0, 2)], t[(1, 1)] * p[1] + t[(1, 2)])
    };

    // At least 9 rows so the SVD yields the full right singular basis.
    let rows = (2 * n).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (i, (s, d)) in src.iter().zip(&dst).enumerate() {
        let (x, y) = norm(&t_src, *s);
        let (u, v) = norm(&t_dst, *d);
        let r0 = 2 * i;
        let r1 = r0 + 1;
        a[(r0, 0)] = -x;
        a[(r0, 1)] = -y;
        a[(r0, 2)] = -1.0;
        a[(r0, 6)] = u * x;
        a[(r0, 7)] = u * y;
        a[(r0, 8)] = u;
        a[(r1, 3)] = -x;
        a[(r1, 4)] = -y;
        a[(r1, 5)] = -1.0;
        a[(r1, 6)] = v * x;
        a[(r1, 7)] = v * y;
        a[(r1, 8)] = v;
    }

    let svd = a.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::DegenerateConfiguration("SVD did not converge".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma = |k: usize| svd.singular_values[order[k]];

    // The null vector is the 9th singular direction; the 8th must stay well
    // separated from zero or the solution is not unique.
    let condition = sigma(0) / sigma(7);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::DegenerateConfiguration(format!(
            "design matrix condition number {condition:e} exceeds {MAX_CONDITION:e}"
        )));
    }
    let h = v_t.row(order[8]);
    let hn = Matrix3::from_fn(|r, c| h[3 * r + c]);
    let t_dst_inv = t_dst
        .try_inverse()
        .ok_or_else(|| Error::DegenerateConfiguration("normalization not invertible".into()))?;
    Homography::from_matrix(t_dst_inv * hn * t_src)
}
