use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible `|det(H)|`; also the projective denominator guard.
pub const DET_EPS: f64 = 1e-12;

/// 3x3 perspective transform with `h[2][2] == 1`.
#[derive(Clone, Copy, PartialEq)]
pub struct Homography(Matrix3<f64>);

impl fmt::Debug for Homography {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Homography").field(&self.to_rows()).finish()
    }
}

impl Homography {
    pub fn identity() -> Self {
        Homography(Matrix3::identity())
    }

    /// Normalize so `h[2][2] == 1` and check invertibility.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "homography has non-finite entries".into(),
            ));
        }
        let scale = m[(2, 2)];
        if scale.abs() < DET_EPS {
            return Err(Error::InvalidArgument(
                "homography with vanishing h33 cannot be normalized".into(),
            ));
        }
        let m = m / scale;
        let det = m.determinant();
        if !(det.abs() > DET_EPS) {
            return Err(Error::SingularHomography { det });
        }
        Ok(Homography(m))
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        Self::from_matrix(Matrix3::from_fn(|r, c| rows[r][c]))
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        let mut m = Matrix3::identity();
        m[(0, 2)] = tx;
        m[(1, 2)] = ty;
        Homography(m)
    }

    /// Rotation by `theta` radians about the origin.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Homography(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    pub fn scaling(factor: f64) -> Result<Self> {
        Self::from_matrix(Matrix3::new(
            factor, 0.0, 0.0, 0.0, factor, 0.0, 0.0, 0.0, 1.0,
        ))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn to_rows(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    /// Map a point: `((h11 x + h12 y + h13) / w, (h21 x + h22 y + h23) / w)`
    /// with `w = h31 x + h32 y + 1`.
    pub fn apply(&self, (x, y): (f64, f64)) -> Result<(f64, f64)> {
        let p = self.0 * Vector3::new(x, y, 1.0);
        if p.z.abs() < DET_EPS {
            return Err(Error::DegeneratePoint { x, y });
        }
        Ok((p.x / p.z, p.y / p.z))
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Homography) -> Result<Homography> {
        Self::from_matrix(self.0 * other.0)
    }

    pub fn inverse(&self) -> Result<Homography> {
        let inv = self
            .0
            .try_inverse()
            .ok_or(Error::SingularHomography { det: self.det() })?;
        Self::from_matrix(inv)
    }

    /// Express the same motion at a resolution scaled by `factor`
    /// (conjugation by a scaling homography).
    pub fn rescaled(&self, factor: f64) -> Result<Homography> {
        let s = Self::scaling(factor)?;
        s.compose(self)?.compose(&Self::scaling(1.0 / factor)?)
    }

    /// `(h13, h23)`.
    pub fn translation_part(&self) -> (f64, f64) {
        (self.0[(0, 2)], self.0[(1, 2)])
    }

    /// Angle of the rotation factor in the polar decomposition of the
    /// upper-left 2x2 block.
    pub fn rotation_angle(&self) -> f64 {
        let m = &self.0;
        (m[(1, 0)] - m[(0, 1)]).atan2(m[(0, 0)] + m[(1, 1)])
    }

    pub fn is_identity(&self) -> bool {
        self.0 == Matrix3::identity()
    }

    pub fn max_abs_diff(&self, other: &Homography) -> f64 {
        (self.0 - other.0).abs().max()
    }
}

impl Default for Homography {
    fn default() -> Self {
        Homography::identity()
    }
}

impl Serialize for Homography {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixRepr {
    Nested([[f64; 3]; 3]),
    Flat([f64; 9]),
}

impl<'de> Deserialize<'de> for Homography {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = match MatrixRepr::deserialize(deserializer)? {
            MatrixRepr::Nested(rows) => rows,
            MatrixRepr::Flat(f) => [[f[0], f[1], f[2]], [f[3], f[4], f[5]], [f[6], f[7], f[8]]],
        };
        Homography::from_rows(rows).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Homography {
        Homography::from_rows([[1.01, 0.02, 3.5], [-0.015, 0.99, -2.25], [1e-4, -2e-4, 1.0]])
            .unwrap()
    }

    #[test]
    fn apply_identity_and_translation() {
        assert_eq!(
            Homography::identity().apply((5.0, 7.0)).unwrap(),
            (5.0, 7.0)
        );
        assert_eq!(
            Homography::translation(2.0, -3.0)
                .apply((0.0, 0.0))
                .unwrap(),
            (2.0, -3.0)
        );
    }

    #[test]
    fn apply_perspective_row() {
        let h =
            Homography::from_rows([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.001, 0.0, 1.0]]).unwrap();
        let (x, y) = h.apply((10.0, 0.0)).unwrap();
        assert!((x - 10.0 / 1.01).abs() < 1e-12);
        assert!((x - 9.900_990_099_009_901).abs() < 1e-12);
        assert_eq!(y, 0.0);
    }

    #[test]
    fn apply_rejects_line_at_infinity() {
        let h =
            Homography::from_rows([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.01, 0.0, 1.0]]).unwrap();
        assert!(matches!(
            h.apply((-100.0, 3.0)),
            Err(Error::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn inverse_is_two_sided() {
        let h = sample();
        let inv = h.inverse().unwrap();
        assert!(
            h.compose(&inv)
                .unwrap()
                .max_abs_diff(&Homography::identity())
                < 1e-10
        );
        assert!(
            inv.compose(&h)
                .unwrap()
                .max_abs_diff(&Homography::identity())
                < 1e-10
        );
    }

    #[test]
    fn identity_is_neutral() {
        let h = sample();
        assert_eq!(Homography::identity().compose(&h).unwrap(), h);
        assert_eq!(h.compose(&Homography::identity()).unwrap(), h);
    }

    #[test]
    fn translations_add() {
        let a = Homography::translation(1.25, -4.0);
        let b = Homography::translation(-0.5, 2.5);
        let c = a.compose(&b).unwrap();
        assert_eq!(c.translation_part(), (0.75, -1.5));
    }

    #[test]
    fn singular_rejected() {
        let r = Homography::from_rows([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(r, Err(Error::SingularHomography { .. })));
    }

    #[test]
    fn normalizes_h33() {
        let h = Homography::from_rows([[2.0, 0.0, 4.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]]).unwrap();
        assert_eq!(h.to_rows()[2][2], 1.0);
        assert_eq!(h.translation_part(), (2.0, 0.0));
    }

    #[test]
    fn rotation_angle_recovered() {
        let h = Homography::translation(3.0, 1.0)
            .compose(&Homography::rotation(0.03))
            .unwrap();
        assert!((h.rotation_angle() - 0.03).abs() < 1e-12);
    }

    #[test]
    fn rescale_scales_translation() {
        let h = Homography::translation(4.0, -2.0).rescaled(0.5).unwrap();
        assert!(h.max_abs_diff(&Homography::translation(2.0, -1.0)) < 1e-12);
    }

    #[test]
    fn serde_accepts_nested_and_flat() {
        let h = sample();
        let s = serde_json::to_string(&h).unwrap();
        let back: Homography = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
        let flat: Homography = serde_json::from_str("[1,0,2,0,1,3,0,0,1]").unwrap();
        assert_eq!(flat, Homography::translation(2.0, 3.0));
        assert!(serde_json::from_str::<Homography>("[[0,0,0],[0,0,0],[0,0,1]]").is_err());
    }
}
