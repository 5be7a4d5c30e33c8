//! Rotation and skew-matrix algebra in three dimensions.
//!
//! Skew generators are stored as coefficients on the basis `S12, S13, S23`,
//! where `S_hk` has `+1` at `(h, k)`, `-1` at `(k, h)` and zeros elsewhere.
//! The rotation `e^{Zt}` turns about the axis vector `w = (-c23, c13, -c12)`
//! (so that `Z v = w x v`) at angular rate `|w|`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type Vector3 = nalgebra::Vector3<f64>;

/// The South Pole `[0, 0, -1]`, fixed by every `e^{S12 t}`.
pub fn south_pole() -> Vector3 {
    Vector3::new(0.0, 0.0, -1.0)
}

/// Element of so(3): `c12*S12 + c13*S13 + c23*S23`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SkewGenerator {
    pub c12: f64,
    pub c13: f64,
    pub c23: f64,
}

impl SkewGenerator {
    pub const fn new(c12: f64, c13: f64, c23: f64) -> Self {
        Self { c12, c13, c23 }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub const fn s12() -> Self {
        Self::new(1.0, 0.0, 0.0)
    }

    pub const fn s13() -> Self {
        Self::new(0.0, 1.0, 0.0)
    }

    pub const fn s23() -> Self {
        Self::new(0.0, 0.0, 1.0)
    }

    /// The canonical second generator `rho*S12 + S23`.
    pub const fn canonical_z2(rho: f64) -> Self {
        Self::new(rho, 0.0, 1.0)
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let Self { c12, c13, c23 } = *self;
        Matrix3::new(
            0.0, c12, c13, //
            -c12, 0.0, c23, //
            -c13, -c23, 0.0,
        )
    }

    /// Reads the strictly upper triangle; the caller is responsible for
    /// skewness of `m` (see [`SkewGenerator::try_from_matrix`]).
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self::new(m[(0, 1)], m[(0, 2)], m[(1, 2)])
    }

    pub fn try_from_matrix(m: &Matrix3<f64>, tol: f64) -> Result<Self> {
        let asym = (m + m.transpose()).abs().max();
        if !m.iter().all(|v| v.is_finite()) || asym > tol {
            return Err(Error::input(format!(
                "matrix is not skew-symmetric (|Z + Z^T|_max = {asym:e})"
            )));
        }
        Ok(Self::from_matrix(&(0.5 * (m - m.transpose()))))
    }

    pub fn axis_vector(&self) -> Vector3 {
        Vector3::new(-self.c23, self.c13, -self.c12)
    }

    pub fn from_axis_vector(w: &Vector3) -> Self {
        Self::new(-w.z, w.y, -w.x)
    }

    /// Angular rate of `e^{Zt}`.
    pub fn speed(&self) -> f64 {
        (self.c12 * self.c12 + self.c13 * self.c13 + self.c23 * self.c23).sqrt()
    }

    /// Period of `t -> e^{Zt}`, or `None` for the zero generator.
    pub fn period(&self) -> Option<f64> {
        let s = self.speed();
        (s > 0.0).then(|| 2.0 * PI / s)
    }

    pub fn is_zero(&self) -> bool {
        self.c12 == 0.0 && self.c13 == 0.0 && self.c23 == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.c12.is_finite() && self.c13.is_finite() && self.c23.is_finite()
    }

    /// `T Z T^T` for any orthogonal `T` (including reflections).
    pub fn conjugated_by(&self, t: &Matrix3<f64>) -> Self {
        Self::from_matrix(&(t * self.matrix() * t.transpose()))
    }

    /// Lie bracket `[Z, W] = ZW - WZ`.
    pub fn bracket(&self, other: &Self) -> Self {
        Self::from_axis_vector(&self.axis_vector().cross(&other.axis_vector()))
    }
}

impl Add for SkewGenerator {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.c12 + o.c12, self.c13 + o.c13, self.c23 + o.c23)
    }
}

impl Sub for SkewGenerator {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.c12 - o.c12, self.c13 - o.c13, self.c23 - o.c23)
    }
}

impl Neg for SkewGenerator {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.c12, -self.c13, -self.c23)
    }
}

impl Mul<f64> for SkewGenerator {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.c12 * s, self.c13 * s, self.c23 * s)
    }
}

impl Mul<SkewGenerator> for f64 {
    type Output = SkewGenerator;
    fn mul(self, z: SkewGenerator) -> SkewGenerator {
        z * self
    }
}

fn rows_of(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn matrix_of(rows: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| rows[i][j])
}

fn orthogonality_defect(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).abs().max()
}

/// A 3x3 orthogonal matrix with determinant `+1`.
#[derive(Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates `|X^T X - I|_max < tol` and `det X > 0`.
    pub fn new(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(Error::input("rotation matrix has non-finite entries"));
        }
        let defect = orthogonality_defect(&m);
        if defect >= tol {
            return Err(Error::input(format!(
                "matrix is not orthogonal (|X^T X - I|_max = {defect:e})"
            )));
        }
        if m.determinant() <= 0.0 {
            return Err(Error::input("rotation matrix must have determinant +1"));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: [[f64; 3]; 3], tol: f64) -> Result<Self> {
        Self::new(matrix_of(&rows), tol)
    }

    /// Wraps a matrix already known to be a rotation (products and
    /// conjugates of rotations).
    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        rows_of(&self.0)
    }

    /// Zero-based entry access.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, v: &Vector3) -> Vector3 {
        self.0 * v
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (self.0 - other.0).norm()
    }

    /// `T X T^T`.
    pub fn conjugated_by(&self, t: &Matrix3<f64>) -> Self {
        Self(t * self.0 * t.transpose())
    }

    /// Image of the South Pole, i.e. the negated third column.
    pub fn south_pole_image(&self) -> Vector3 {
        -self.0.column(2).into_owned()
    }
}

impl Mul for RotationMatrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self(self.0 * o.0)
    }
}

impl Mul<&RotationMatrix> for &RotationMatrix {
    type Output = RotationMatrix;
    fn mul(self, o: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * o.0)
    }
}

impl fmt::Debug for RotationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("RotationMatrix").field(&self.rows()).finish()
    }
}

impl Serialize for RotationMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RotationMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = <[[f64; 3]; 3]>::deserialize(d)?;
        Self::from_rows(rows, Tolerances::default().validation).map_err(serde::de::Error::custom)
    }
}

/// A 3x3 orthogonal matrix with determinant `+1` or `-1`.
#[derive(Clone, Copy, PartialEq)]
pub struct OrthogonalMatrix(Matrix3<f64>);

impl OrthogonalMatrix {
    pub fn new(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(Error::input("orthogonal matrix has non-finite entries"));
        }
        let defect = orthogonality_defect(&m);
        if defect >= tol {
            return Err(Error::input(format!(
                "matrix is not orthogonal (|T^T T - I|_max = {defect:e})"
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        rows_of(&self.0)
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }
}

impl fmt::Debug for OrthogonalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("OrthogonalMatrix")
            .field(&self.rows())
            .finish()
    }
}

impl Serialize for OrthogonalMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// `S_hk` for `(h, k)` in `{(1,2), (1,3), (2,3)}` (one-based, as written).
pub fn s_basis(h: usize, k: usize) -> Result<SkewGenerator> {
    match (h, k) {
        (1, 2) => Ok(SkewGenerator::s12()),
        (1, 3) => Ok(SkewGenerator::s13()),
        (2, 3) => Ok(SkewGenerator::s23()),
        _ => Err(Error::input(format!(
            "no basis matrix S_{h}{k}; expected h < k <= 3"
        ))),
    }
}

/// Rotation by `angle` about a unit axis (right-hand rule), Rodrigues form.
pub(crate) fn axis_angle_matrix(unit_axis: &Vector3, angle: f64) -> Matrix3<f64> {
    let k = unit_axis.cross_matrix();
    let (s, c) = angle.sin_cos();
    Matrix3::identity() + k * s + k * k * (1.0 - c)
}

/// `e^{Zt}` in closed form.
pub fn exp_rot(z: &SkewGenerator, t: f64) -> RotationMatrix {
    let w = z.axis_vector();
    let speed = w.norm();
    if speed == 0.0 || t == 0.0 {
        return RotationMatrix::identity();
    }
    RotationMatrix(axis_angle_matrix(&(w / speed), speed * t))
}

/// Inverse of [`exp_rot`]: a unit-speed generator and an angle in `[0, pi]`.
///
/// At angle `pi` the axis sign is chosen so that the largest-magnitude
/// coefficient of the generator is positive. Near the identity returns the
/// zero generator with angle 0.
pub fn log_rot(x: &RotationMatrix) -> (SkewGenerator, f64) {
    let m = &x.0;
    let vee = Vector3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    );
    let sin_a = 0.5 * vee.norm();
    let cos_a = 0.5 * (m.trace() - 1.0);
    let angle = sin_a.atan2(cos_a);
    if angle < 1e-14 {
        return (SkewGenerator::zero(), 0.0);
    }
    if angle < PI - 1e-6 {
        return (SkewGenerator::from_axis_vector(&(vee / vee.norm())), angle);
    }

    // Near pi the antisymmetric part vanishes; read the axis from
    // (X + X^T)/2 = cos(a) I + (1 - cos(a)) n n^T.
    let sym = 0.5 * (m + m.transpose());
    let one_minus_c = 1.0 - cos_a;
    let nn = (sym - Matrix3::identity() * cos_a) / one_minus_c;
    let col = (0..3)
        .max_by(|&a, &b| nn[(a, a)].total_cmp(&nn[(b, b)]))
        .unwrap_or(0);
    let mut n: Vector3 = nn.column(col).into_owned();
    n /= n.norm();
    let gen_sign = if vee.dot(&n) < 0.0 { -1.0 } else { 1.0 };
    if vee.norm() > 1e-12 {
        n *= gen_sign;
        return (SkewGenerator::from_axis_vector(&n), angle);
    }
    let mut g = SkewGenerator::from_axis_vector(&n);
    let coeffs = [g.c12, g.c13, g.c23];
    let largest = coeffs
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if largest < 0.0 {
        g = -g;
    }
    (g, angle)
}

/// Trace inner product `Trace(Z1 Z2^T)`.
pub fn inner(a: &SkewGenerator, b: &SkewGenerator) -> f64 {
    2.0 * (a.c12 * b.c12 + a.c13 * b.c13 + a.c23 * b.c23)
}

/// Cosine of the angle between two generators under [`inner`].
pub fn cos_angle_psi(a: &SkewGenerator, b: &SkewGenerator) -> Result<f64> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::input(
            "cosine of angle is undefined for a zero generator",
        ));
    }
    let psi = inner(a, b) / (inner(a, a).sqrt() * inner(b, b).sqrt());
    Ok(psi.clamp(-1.0, 1.0))
}
