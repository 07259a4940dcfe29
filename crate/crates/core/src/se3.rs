//! Rigid-body poses, axis-angle rotations, the goal distance and the
//! Hammersley point set.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance used when validating orthonormality of deserialized rotations.
pub const ROTATION_TOL: f64 = 1e-9;

/// A proper rotation stored as an orthonormal 3x3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Wraps a matrix without checking it. Callers must guarantee
    /// orthonormality; use [`Rotation::try_from_matrix`] for untrusted input.
    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Rotation(m)
    }

    pub fn try_from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let r = Rotation(m);
        if r.is_valid(1e-6) {
            Ok(r)
        } else {
            Err(Error::Invariant(format!("matrix is not a proper rotation: {m}")))
        }
    }

    /// Row-major constructor.
    pub fn from_rows(rows: [f64; 9]) -> Result<Self> {
        Self::try_from_matrix(Matrix3::from_row_slice(&rows))
    }

    pub fn rot_x(angle: f64) -> Self {
        Self::from_axis_angle(&Vector3::new(angle, 0.0, 0.0))
    }

    pub fn rot_y(angle: f64) -> Self {
        Self::from_axis_angle(&Vector3::new(0.0, angle, 0.0))
    }

    pub fn rot_z(angle: f64) -> Self {
        Self::from_axis_angle(&Vector3::new(0.0, 0.0, angle))
    }

    /// Rodrigues' formula. The vector direction is the axis and its norm the
    /// angle; any magnitude is accepted.
    pub fn from_axis_angle(v: &Vector3<f64>) -> Self {
        axis_angle_to_rotation(v)
    }

    /// Inverse of [`Rotation::from_axis_angle`], canonicalized to `‖v‖ ≤ π`.
    pub fn to_axis_angle(&self) -> Vector3<f64> {
        rotation_to_axis_angle(self)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn to_rows(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    /// Checks `RᵀR = I` and `det R = +1` entrywise within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let m = &self.0;
        if m.iter().any(|x| !x.is_finite()) {
            return false;
        }
        let err = (m.transpose() * m - Matrix3::identity()).abs().max();
        err <= tol && (m.determinant() - 1.0).abs() <= tol
    }

    /// Projects back onto SO(3) via Gram-Schmidt on the columns. Used to keep
    /// long products from drifting.
    pub(crate) fn renormalized(&self) -> Self {
        let m = &self.0;
        let x = m.column(0).normalize();
        let y = (m.column(1) - x * x.dot(&m.column(1))).normalize();
        let z = x.cross(&y);
        Rotation(Matrix3::from_columns(&[x, y, z]))
    }

    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul for &Rotation {
    type Output = Rotation;

    fn mul(self, rhs: &Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

/// Rigid transform in SE(3).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Pose {
    pub rotation: Rotation,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Rotation::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Rotation, translation: Vector3<f64>) -> Self {
        Pose {
            rotation,
            translation,
        }
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Pose {
            rotation: Rotation::identity(),
            translation: Vector3::new(x, y, z),
        }
    }

    pub fn from_rotation(rotation: Rotation) -> Self {
        Pose {
            rotation,
            translation: Vector3::zeros(),
        }
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        compose(self, other)
    }

    pub fn inverse(&self) -> Pose {
        invert(self)
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.0 * p + self.translation
    }

    /// Applies `self⁻¹` to a point without building the inverse.
    pub fn inverse_transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.0.tr_mul(&(p - self.translation))
    }

    pub fn is_valid(&self) -> bool {
        self.rotation.is_valid(ROTATION_TOL) && self.translation.iter().all(|x| x.is_finite())
    }

    /// Largest absolute entrywise difference of the homogeneous matrices.
    pub fn max_abs_diff(&self, other: &Pose) -> f64 {
        let r = (self.rotation.0 - other.rotation.0).abs().max();
        let t = (self.translation - other.translation).abs().max();
        r.max(t)
    }
}

impl Mul for Pose {
    type Output = Pose;

    fn mul(self, rhs: Pose) -> Pose {
        compose(&self, &rhs)
    }
}

impl Mul for &Pose {
    type Output = Pose;

    fn mul(self, rhs: &Pose) -> Pose {
        compose(self, rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct PoseRepr {
    rotation: [f64; 9],
    translation: [f64; 3],
}

impl Serialize for Pose {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PoseRepr {
            rotation: self.rotation.to_rows(),
            translation: [self.translation.x, self.translation.y, self.translation.z],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PoseRepr::deserialize(d)?;
        let rotation = Rotation::from_rows(repr.rotation).map_err(serde::de::Error::custom)?;
        let translation = Vector3::from(repr.translation);
        if translation.iter().any(|x| !x.is_finite()) {
            return Err(serde::de::Error::custom("pose translation is not finite"));
        }
        Ok(Pose {
            rotation,
            translation,
        })
    }
}

/// Homogeneous-transform product `a · b`.
pub fn compose(a: &Pose, b: &Pose) -> Pose {
    Pose {
        rotation: Rotation(a.rotation.0 * b.rotation.0),
        translation: a.rotation.0 * b.translation + a.translation,
    }
}

pub fn invert(p: &Pose) -> Pose {
    let rt = p.rotation.0.transpose();
    Pose {
        translation: -(rt * p.translation),
        rotation: Rotation(rt),
    }
}

pub fn axis_angle_to_rotation(v: &Vector3<f64>) -> Rotation {
    let theta = v.norm();
    if theta < 1e-12 {
        // First-order expansion keeps tiny vectors exactly orthonormal enough
        // and avoids dividing by zero.
        let k = skew(v);
        return Rotation(Matrix3::identity() + k).renormalized();
    }
    let axis = v / theta;
    let k = skew(&axis);
    let (s, c) = theta.sin_cos();
    Rotation(Matrix3::identity() + k * s + k * k * (1.0 - c))
}

/// Axis-angle vector with `‖v‖ ∈ [0, π]`.
pub fn rotation_to_axis_angle(r: &Rotation) -> Vector3<f64> {
    let m = &r.0;
    let cos = ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let theta = cos.acos();
    let w = Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]);
    if theta < 1e-7 {
        return w * 0.5;
    }
    if PI - theta > 1e-4 {
        return w * (theta / (2.0 * theta.sin()));
    }
    // Near π the antisymmetric part vanishes; read the axis from the
    // symmetric part R + I = 2 a aᵀ (for θ = π).
    let b = (m + Matrix3::identity()) * 0.5;
    let (i, _) = (0..3)
        .map(|i| (i, b[(i, i)]))
        .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
    let mut axis: Vector3<f64> = b.column(i).into_owned();
    axis /= axis.norm();
    // Resolve the sign with the (small) antisymmetric part when present.
    if axis.dot(&w) < 0.0 {
        axis = -axis;
    }
    axis * theta
}

/// Geodesic angle between two rotations, in `[0, π]`.
pub fn rotation_angle(a: &Rotation, b: &Rotation) -> f64 {
    let m = a.0.tr_mul(&b.0);
    let cos = ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let angle = cos.acos();
    if angle < 1e-6 {
        // acos loses precision near zero; the antisymmetric part does not.
        let w = Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]);
        return (w.norm() * 0.5).asin();
    }
    angle
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Weight converting rotation angle into an equivalent length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceWeights {
    /// Meters per radian.
    pub lambda_rot: f64,
}

impl DistanceWeights {
    pub fn new(lambda_rot: f64) -> Result<Self> {
        if lambda_rot >= 0.0 && lambda_rot.is_finite() {
            Ok(DistanceWeights { lambda_rot })
        } else {
            Err(Error::Invariant(format!("lambda_rot must be >= 0, got {lambda_rot}")))
        }
    }
}

impl Default for DistanceWeights {
    fn default() -> Self {
        DistanceWeights { lambda_rot: 0.5 }
    }
}

/// Goal distance: translation distance plus weighted geodesic angle.
pub fn pose_distance(a: &Pose, b: &Pose, w: &DistanceWeights) -> f64 {
    (a.translation - b.translation).norm() + w.lambda_rot * rotation_angle(&a.rotation, &b.rotation)
}

/// Base-pose parameter vector: three positions, optionally followed by an
/// axis-angle rotation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BaseParams(Vec<f64>);

impl BaseParams {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != 3 && values.len() != 6 {
            return Err(Error::Arity(values.len()));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invariant("base parameters must be finite".into()));
        }
        Ok(BaseParams(values))
    }

    pub fn zeros(arity: usize) -> Result<Self> {
        Self::new(vec![0.0; arity])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.0[0], self.0[1], self.0[2])
    }

    pub fn rotation_vector(&self) -> Option<Vector3<f64>> {
        (self.0.len() == 6).then(|| Vector3::new(self.0[3], self.0[4], self.0[5]))
    }
}

impl TryFrom<Vec<f64>> for BaseParams {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        BaseParams::new(v)
    }
}

impl From<BaseParams> for Vec<f64> {
    fn from(b: BaseParams) -> Vec<f64> {
        b.0
    }
}

/// Position-only (arity 3) or position followed by axis-angle rotation
/// (arity 6).
pub fn pose_from_params(b: &BaseParams) -> Pose {
    let translation = b.position();
    match b.rotation_vector() {
        None => Pose {
            rotation: Rotation::identity(),
            translation,
        },
        Some(v) => Pose {
            rotation: axis_angle_to_rotation(&v),
            translation,
        },
    }
}

/// Same as [`pose_from_params`] for raw slices; fails on bad arity.
pub fn pose_from_slice(values: &[f64]) -> Result<Pose> {
    match values.len() {
        3 => Ok(Pose::from_translation(values[0], values[1], values[2])),
        6 => Ok(Pose {
            rotation: axis_angle_to_rotation(&Vector3::new(values[3], values[4], values[5])),
            translation: Vector3::new(values[0], values[1], values[2]),
        }),
        n => Err(Error::Arity(n)),
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta - two_pi * (theta / two_pi).round();
    if t <= -PI {
        t += two_pi;
    }
    t
}

/// Canonical axis-angle representative with `‖v‖ ≤ π`. The direction is kept
/// and the signed angle wrapped, so `(0,0,3π/2)` becomes `(0,0,-π/2)`.
pub fn wrap_axis_angle(v: &Vector3<f64>) -> Vector3<f64> {
    let theta = v.norm();
    if theta <= PI {
        return *v;
    }
    let axis = v / theta;
    axis * wrap_angle(theta)
}

/// Van der Corput radical inverse of `i` in base `base`, correctly rounded:
/// the digit-reversed integer over the matching power of the base.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let (mut reversed, mut scale) = (0u64, 1u64);
    while i > 0 {
        reversed = reversed * base + i % base;
        scale *= base;
        i /= base;
    }
    reversed as f64 / scale as f64
}

/// The first `n` primes.
pub fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(n);
    let mut candidate = 2u64;
    while primes.len() < n {
        if primes.iter().take_while(|&&p| p * p <= candidate).all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Hammersley set of `n` points in `[0,1)^dim`: the first coordinate is
/// `i/n`, the others radical inverses in the first `dim-1` prime bases.
pub fn hammersley_points(n: usize, dim: usize) -> Vec<Vec<f64>> {
    assert!(n >= 1 && dim >= 1, "hammersley_points needs n >= 1 and dim >= 1");
    let primes = first_primes(dim.saturating_sub(1));
    (0..n)
        .map(|i| {
            let mut p = Vec::with_capacity(dim);
            p.push(i as f64 / n as f64);
            p.extend(primes.iter().map(|&b| radical_inverse(i as u64, b)));
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rot_eq(a: &Rotation, b: &Rotation, tol: f64) -> bool {
        (a.matrix() - b.matrix()).abs().max() <= tol
    }

    #[test]
    fn compose_identity_and_inverse() {
        let p = Pose::new(Rotation::from_axis_angle(&Vector3::new(0.3, -0.2, 1.1)), Vector3::new(1.0, -2.0, 0.5));
        assert!(compose(&Pose::identity(), &p).max_abs_diff(&p) < 1e-15);
        assert!(compose(&p, &invert(&p)).max_abs_diff(&Pose::identity()) < 1e-9);
        let t = compose(&Pose::from_translation(1.0, 0.0, 0.0), &Pose::from_translation(0.0, 2.0, 0.0));
        assert!(t.max_abs_diff(&Pose::from_translation(1.0, 2.0, 0.0)) < 1e-15);
    }

    #[test]
    fn invert_examples() {
        assert_eq!(invert(&Pose::identity()), Pose::identity());
        let t = invert(&Pose::from_translation(1.0, 2.0, 3.0));
        assert!(t.max_abs_diff(&Pose::from_translation(-1.0, -2.0, -3.0)) < 1e-15);
        let r = invert(&Pose::from_rotation(Rotation::rot_z(0.7)));
        assert!(rot_eq(&r.rotation, &Rotation::rot_z(-0.7), 1e-15));
    }

    #[test]
    fn rodrigues_examples() {
        assert_eq!(axis_angle_to_rotation(&Vector3::zeros()), Rotation::identity());
        let r = axis_angle_to_rotation(&Vector3::new(0.0, 0.0, PI));
        let expected = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
        assert!((r.matrix() - expected).abs().max() < 1e-12);
    }

    #[test]
    fn rotation_angle_examples() {
        let r = Rotation::from_axis_angle(&Vector3::new(0.1, 0.2, 0.3));
        assert_abs_diff_eq!(rotation_angle(&r, &r), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rotation_angle(&Rotation::identity(), &Rotation::rot_z(PI / 2.0)), PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rotation_angle(&Rotation::identity(), &Rotation::rot_x(PI)), PI, epsilon = 1e-9);
    }

    #[test]
    fn pose_distance_examples() {
        let w = DistanceWeights::default();
        let p = Pose::new(Rotation::rot_y(0.4), Vector3::new(0.2, 0.1, 0.0));
        assert_abs_diff_eq!(pose_distance(&p, &p, &w), 0.0, epsilon = 1e-12);
        let q = Pose::new(Rotation::rot_y(0.4), Vector3::new(1.2, 0.1, 0.0));
        for lambda in [0.0, 0.5, 3.0] {
            assert_abs_diff_eq!(pose_distance(&p, &q, &DistanceWeights { lambda_rot: lambda }), 1.0, epsilon = 1e-12);
        }
        let a = Pose::identity();
        let b = Pose::from_rotation(Rotation::rot_x(PI));
        assert_abs_diff_eq!(pose_distance(&a, &b, &DistanceWeights { lambda_rot: 0.5 }), PI / 2.0, epsilon = 1e-8);
    }

    #[test]
    fn pose_from_params_examples() {
        let p = pose_from_params(&BaseParams::zeros(3).unwrap());
        assert_eq!(p, Pose::identity());
        let p = pose_from_params(&BaseParams::new(vec![1.0, 2.0, 3.0]).unwrap());
        assert_eq!(p.translation, Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(p.rotation, Rotation::identity());
        let p = pose_from_params(&BaseParams::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, PI]).unwrap());
        assert_eq!(p.translation, Vector3::zeros());
        let expected = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
        assert!((p.rotation.matrix() - expected).abs().max() < 1e-12);
        assert!(matches!(BaseParams::new(vec![0.0; 4]), Err(Error::Arity(4))));
        assert!(pose_from_slice(&[1.0]).is_err());
    }

    #[test]
    fn wrap_examples() {
        let v = wrap_axis_angle(&Vector3::new(0.0, 0.0, 1.5 * PI));
        assert!((v - Vector3::new(0.0, 0.0, -PI / 2.0)).norm() < 1e-12);
        let v = Vector3::new(0.1, 0.2, 0.3);
        assert_eq!(wrap_axis_angle(&v), v);
    }

    #[test]
    fn hammersley_examples() {
        let pts = hammersley_points(4, 2);
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![0.25, 0.5], vec![0.5, 0.25], vec![0.75, 0.75]]);
        assert_eq!(hammersley_points(1, 1), vec![vec![0.0]]);
        let pts = hammersley_points(3, 3);
        let third: Vec<f64> = pts.iter().map(|p| p[2]).collect();
        assert_abs_diff_eq!(third[0], 0.0);
        assert_abs_diff_eq!(third[1], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(third[2], 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn pose_json_layout() {
        let p = Pose::new(Rotation::rot_z(PI / 2.0), Vector3::new(1.0, 2.0, 3.0));
        let v: serde_json::Value = serde_json::to_value(p).unwrap();
        assert_eq!(v["rotation"].as_array().unwrap().len(), 9);
        assert_eq!(v["translation"], serde_json::json!([1.0, 2.0, 3.0]));
        // Row-major: entry (0,1) of rotZ(π/2) is -1.
        assert_abs_diff_eq!(v["rotation"][1].as_f64().unwrap(), -1.0, epsilon = 1e-12);
        let back: Pose = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
        let bad = serde_json::json!({"rotation": [1,0,0, 0,1,0, 0,0,2], "translation": [0,0,0]});
        assert!(serde_json::from_value::<Pose>(bad).is_err());
    }

    fn vec3(range: f64) -> impl Strategy<Value = Vector3<f64>> {
        (-range..range, -range..range, -range..range).prop_map(|(x, y, z)| Vector3::new(x, y, z))
    }

    fn pose() -> impl Strategy<Value = Pose> {
        (vec3(4.0), vec3(3.0)).prop_map(|(r, t)| Pose::new(axis_angle_to_rotation(&r), t))
    }

    proptest! {
        #[test]
        fn rodrigues_output_is_rotation(v in vec3(50.0)) {
            prop_assert!(axis_angle_to_rotation(&v).is_valid(1e-9));
        }

        #[test]
        fn axis_angle_round_trip(v in vec3(2.0)) {
            prop_assume!(v.norm() > 1e-6 && v.norm() < PI - 1e-6);
            let back = rotation_to_axis_angle(&axis_angle_to_rotation(&v));
            prop_assert!((back - v).norm() < 1e-9, "{} vs {}", back, v);
        }

        #[test]
        fn axis_angle_reads_back_canonical(v in vec3(12.0)) {
            let r = axis_angle_to_rotation(&v);
            let back = rotation_to_axis_angle(&r);
            prop_assert!(back.norm() <= PI + 1e-9);
            prop_assert!(rot_eq(&axis_angle_to_rotation(&back), &r, 1e-6));
        }

        #[test]
        fn pose_distance_is_a_metric(a in pose(), b in pose(), c in pose(), lambda in 0.0..2.0f64) {
            let w = DistanceWeights { lambda_rot: lambda };
            let ab = pose_distance(&a, &b, &w);
            prop_assert!((ab - pose_distance(&b, &a, &w)).abs() < 1e-9);
            prop_assert!(pose_distance(&a, &c, &w) <= ab + pose_distance(&b, &c, &w) + 1e-9);
        }

        #[test]
        fn params_injective(a in vec3(2.0), b in vec3(2.0), ra in vec3(1.7), rb in vec3(1.7)) {
            prop_assume!(ra.norm() < PI - 1e-3 && rb.norm() < PI - 1e-3);
            let pa = BaseParams::new(vec![a.x, a.y, a.z, ra.x, ra.y, ra.z]).unwrap();
            let pb = BaseParams::new(vec![b.x, b.y, b.z, rb.x, rb.y, rb.z]).unwrap();
            let diff = pa.values().iter().zip(pb.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            prop_assume!(diff > 1e-6);
            prop_assert!(pose_from_params(&pa).max_abs_diff(&pose_from_params(&pb)) > 1e-9);
        }

        #[test]
        fn hammersley_properties(n in 1usize..200, dim in 1usize..7) {
            let pts = hammersley_points(n, dim);
            for (i, p) in pts.iter().enumerate() {
                prop_assert_eq!(p[0], i as f64 / n as f64);
                prop_assert!(p.iter().all(|&x| (0.0..1.0).contains(&x)));
            }
            for i in 0..pts.len() {
                for j in 0..i {
                    prop_assert_ne!(&pts[i], &pts[j]);
                }
            }
        }
    }
}
