//! SU(2) through the double cover `SU(2) -> SO(3)`.
//!
//! The Lie algebra isomorphism sends the basis
//!
//! ```text
//! Sx = [[0, -i], [-i, 0]],  Sy = [[0, -1], [1, 0]],  Sz = [[-i, 0], [0, i]]
//! ```
//!
//! to `2*S13`, `2*S23`, `-2*S12`. The induced group map is two-to-one with
//! kernel `{I, -I}`, so a factorization solved in SO(3) lifts to one of
//! `+X` or `-X`; the sign is then fixed by a half-period shift of one factor.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorizer::{factor_with_generators, Axis, Factor};
use crate::so3::{RotationMatrix, SkewGenerator};
use crate::tolerance::Tolerances;

/// `bx*Sx + by*Sy + bz*Sz` in su(2).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SuGenerator {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl SuGenerator {
    pub const fn new(bx: f64, by: f64, bz: f64) -> Self {
        Self { bx, by, bz }
    }

    pub const fn sx() -> Self {
        Self::new(1.0, 0.0, 0.0)
    }

    pub const fn sy() -> Self {
        Self::new(0.0, 1.0, 0.0)
    }

    pub const fn sz() -> Self {
        Self::new(0.0, 0.0, 1.0)
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        let i = Complex64::i();
        let (bx, by, bz) = (self.bx, self.by, self.bz);
        Matrix2::new(-i * bz, -i * bx - by, -i * bx + by, i * bz)
    }

    /// Reads the coefficients of a traceless anti-Hermitian matrix.
    pub fn from_matrix(m: &Matrix2<Complex64>) -> Self {
        Self::new(-m[(1, 0)].im, m[(1, 0)].re, -m[(0, 0)].im)
    }

    /// Rotation rate: the eigenvalues are `+-i * rate`.
    pub fn rate(&self) -> f64 {
        (self.bx * self.bx + self.by * self.by + self.bz * self.bz).sqrt()
    }

    /// Full period `2 pi / rate` of `t -> e^{V t}` in SU(2).
    pub fn period(&self) -> Option<f64> {
        let w = self.rate();
        (w > 0.0).then(|| 2.0 * PI / w)
    }

    pub fn is_finite(&self) -> bool {
        self.bx.is_finite() && self.by.is_finite() && self.bz.is_finite()
    }

    pub fn bracket(&self, other: &Self) -> Self {
        let (a, b) = (self.matrix(), other.matrix());
        Self::from_matrix(&(a * b - b * a))
    }
}

impl std::ops::Add for SuGenerator {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.bx + o.bx, self.by + o.by, self.bz + o.bz)
    }
}

impl Mul<f64> for SuGenerator {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.bx * s, self.by * s, self.bz * s)
    }
}

/// A 2x2 unitary matrix with determinant 1.
#[derive(Clone, Copy, PartialEq)]
pub struct Unitary2(Matrix2<Complex64>);

impl Unitary2 {
    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn new(m: Matrix2<Complex64>, tol: f64) -> Result<Self> {
        if !m.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::input("unitary matrix has non-finite entries"));
        }
        let defect = (m * m.adjoint() - Matrix2::identity()).norm();
        if defect >= tol {
            return Err(Error::input(format!(
                "matrix is not unitary (|U U^H - I| = {defect:e})"
            )));
        }
        let det = m.determinant();
        if (det - Complex64::new(1.0, 0.0)).norm() >= tol {
            return Err(Error::input(format!(
                "unitary matrix must have determinant 1 (got {det})"
            )));
        }
        Ok(Self(m))
    }

    /// Entries as `[re, im]` pairs, row-major.
    pub fn from_pairs(rows: [[[f64; 2]; 2]; 2], tol: f64) -> Result<Self> {
        let c = |i: usize, j: usize| Complex64::new(rows[i][j][0], rows[i][j][1]);
        Self::new(Matrix2::new(c(0, 0), c(0, 1), c(1, 0), c(1, 1)), tol)
    }

    pub fn pairs(&self) -> [[[f64; 2]; 2]; 2] {
        std::array::from_fn(|i| std::array::from_fn(|j| [self.0[(i, j)].re, self.0[(i, j)].im]))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn neg(&self) -> Self {
        Self(-self.0)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.0 - other.0).norm()
    }
}

impl Mul for Unitary2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self(self.0 * o.0)
    }
}

impl fmt::Debug for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Unitary2").field(&self.pairs()).finish()
    }
}

impl Serialize for Unitary2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Unitary2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = <[[[f64; 2]; 2]; 2]>::deserialize(d)?;
        Self::from_pairs(rows, Tolerances::default().validation).map_err(serde::de::Error::custom)
    }
}

/// `e^{V t} = cos(wt) I + sin(wt) V / w`, using `V^2 = -w^2 I`.
pub fn exp_su(v: &SuGenerator, t: f64) -> Unitary2 {
    let w = v.rate();
    if w == 0.0 || t == 0.0 {
        return Unitary2::identity();
    }
    let (s, c) = (w * t).sin_cos();
    let m = Matrix2::identity() * Complex64::new(c, 0.0) + v.matrix() * Complex64::new(s / w, 0.0);
    Unitary2(m)
}

/// Lie algebra isomorphism su(2) -> so(3).
pub fn phi_tilde(v: &SuGenerator) -> SkewGenerator {
    SkewGenerator::new(-2.0 * v.bz, 2.0 * v.bx, 2.0 * v.by)
}

/// Inverse of [`phi_tilde`].
pub fn phi_tilde_inverse(z: &SkewGenerator) -> SuGenerator {
    SuGenerator::new(0.5 * z.c13, 0.5 * z.c23, -0.5 * z.c12)
}

/// The covering map, computed from the adjoint action `V -> U V U^H`.
///
/// Column `j` of the image is the `phi_tilde` axis of `U V_j U^H`, where
/// `V_j` is the element whose axis is the `j`-th unit vector.
pub fn phi(u: &Unitary2) -> RotationMatrix {
    let basis = [
        SuGenerator::new(0.0, -0.5, 0.0),
        SuGenerator::new(0.5, 0.0, 0.0),
        SuGenerator::new(0.0, 0.0, 0.5),
    ];
    let m = u.matrix();
    let mut out = Matrix3::zeros();
    for (j, v) in basis.iter().enumerate() {
        let conj = SuGenerator::from_matrix(&(m * v.matrix() * m.adjoint()));
        out.set_column(j, &phi_tilde(&conj).axis_vector());
    }
    RotationMatrix::from_matrix_unchecked(out)
}

/// Factorization over two su(2) generators; parameters are times along the
/// original subgroups, each in `[0, full period)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Su2Factorization {
    pub z1: SuGenerator,
    pub z2: SuGenerator,
    pub factors: Vec<Factor>,
}

impl Su2Factorization {
    pub fn generator(&self, axis: Axis) -> SuGenerator {
        match axis {
            Axis::Z1 => self.z1,
            Axis::Z2 => self.z2,
        }
    }

    pub fn reconstruct(&self) -> Unitary2 {
        self.factors.iter().fold(Unitary2::identity(), |acc, f| {
            acc * exp_su(&self.generator(f.axis), f.parameter)
        })
    }
}

/// Minimum-length factorization of an SU(2) target, exact including sign.
pub fn factor_su2(
    target: &Unitary2,
    z1: &SuGenerator,
    z2: &SuGenerator,
    tol: &Tolerances,
) -> Result<Su2Factorization> {
    if !z1.is_finite() || !z2.is_finite() {
        return Err(Error::input("generators must be finite"));
    }
    let projected = phi(target);
    let so3 = factor_with_generators(&projected, &phi_tilde(z1), &phi_tilde(z2), tol)?;
    let mut lifted = Su2Factorization {
        z1: *z1,
        z2: *z2,
        factors: so3.factors,
    };

    let product = lifted.reconstruct();
    if product.distance(target) <= product.distance(&target.neg()) {
        return Ok(lifted);
    }
    // e^{V pi/w} = -I, so a half-period shift of one factor flips the sign.
    let first_axis = lifted.factors.first().map(|f| f.axis);
    match first_axis {
        Some(axis) => {
            let period = lifted.generator(axis).period().unwrap_or(f64::INFINITY);
            let first = &mut lifted.factors[0];
            first.parameter = (first.parameter + 0.5 * period).rem_euclid(period);
        }
        None => lifted.factors.push(Factor::new(Axis::Z1, PI / z1.rate())),
    }
    Ok(lifted)
}
