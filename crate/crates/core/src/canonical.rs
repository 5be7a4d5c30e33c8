//! Reduction of a generator pair to the canonical form
//! `Z1 = S12`, `Z2 = rho*S12 + S23`.
//!
//! A rotation `T = T2 T1` brings `Z1` to `lambda1*S12` and `Z2` to
//! `a*S12 + d*S23`. Dividing by `lambda1` and `d` rescales the subgroup
//! parameters and leaves the single invariant `rho = a / d`.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factorizer::Axis;
use crate::so3::{
    cos_angle_psi, exp_rot, OrthogonalMatrix, RotationMatrix, SkewGenerator, Vector3,
};

/// Relative threshold on `|d|` below which a pair counts as dependent.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalPair {
    /// The composite change of frame `T = T2 T1`.
    #[serde(rename = "T")]
    pub t: RotationMatrix,
    pub lambda1: f64,
    pub a: f64,
    pub d: f64,
    pub rho: f64,
    pub psi: f64,
}

impl CanonicalPair {
    /// Scale factor between canonical and original parameters of `axis`.
    pub fn scale(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Z1 => self.lambda1,
            Axis::Z2 => self.d,
        }
    }

    /// Period of the original one-parameter subgroup of `axis`.
    pub fn original_period(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Z1 => 2.0 * PI / self.lambda1.abs(),
            Axis::Z2 => 2.0 * PI / (self.d.abs() * (1.0 + self.rho * self.rho).sqrt()),
        }
    }

    /// The original generators recovered from the canonical data,
    /// `T^T (lambda1 S12) T` and `T^T (a S12 + d S23) T`.
    pub fn original_generators(&self) -> (SkewGenerator, SkewGenerator) {
        let tt = self.t.matrix().transpose();
        let z1 = (SkewGenerator::s12() * self.lambda1).conjugated_by(&tt);
        let z2 = SkewGenerator::new(self.a, 0.0, self.d).conjugated_by(&tt);
        (z1, z2)
    }
}

/// Unit vectors `v1, v2` completing `v3` to a right-handed orthonormal
/// basis, chosen deterministically.
fn complete_basis(v3: &Vector3) -> (Vector3, Vector3) {
    let mut v1 = Vector3::z().cross(v3);
    if v1.norm() < 1e-6 {
        v1 = Vector3::x().cross(v3);
    }
    v1 /= v1.norm();
    let v2 = v3.cross(&v1);
    (v1, v2)
}

pub fn canonicalize(z1: &SkewGenerator, z2: &SkewGenerator) -> Result<CanonicalPair> {
    if !z1.is_finite() || !z2.is_finite() {
        return Err(Error::input("generators must be finite"));
    }
    if z1.is_zero() {
        return Err(Error::input("Z1 must be nonzero"));
    }
    if z2.is_zero() {
        return Err(Error::DependentGenerators);
    }

    // T1 = [v1, v2, v3]^T with v3 spanning the kernel of Z1 (its axis).
    // v3 = -w1/|w1| makes lambda1 = |w1| > 0.
    let w1 = z1.axis_vector();
    let v3 = -w1 / w1.norm();
    let (v1, v2) = complete_basis(&v3);
    let t1 = Matrix3::from_rows(&[v1.transpose(), v2.transpose(), v3.transpose()]);

    let lambda1 = z1.conjugated_by(&t1).c12;
    let SkewGenerator {
        c12: a,
        c13: b,
        c23: c,
    } = z2.conjugated_by(&t1);

    // T2 = e^{S12 theta} with b cos(theta) + c sin(theta) = 0.
    let theta = (-b).atan2(c);
    let t2 = exp_rot(&SkewGenerator::s12(), theta);
    let t = t2.matrix() * t1;
    let conj2 = z2.conjugated_by(&t);
    let d = conj2.c23;

    if d.abs() < DEPENDENCE_THRESHOLD * z2.speed() {
        return Err(Error::DependentGenerators);
    }

    let rho = a / d;
    let psi = cos_angle_psi(z1, z2)?;
    Ok(CanonicalPair {
        t: RotationMatrix::from_matrix_unchecked(t),
        lambda1,
        a,
        d,
        rho,
        psi,
    })
}

/// The orthogonal involution exchanging the roles of `S12` and
/// `rho*S12 + S23` up to scale and sign. Its determinant is `-1`.
pub fn tilde_reflection(rho: f64) -> OrthogonalMatrix {
    let r = (1.0 + rho * rho).sqrt();
    OrthogonalMatrix::from_matrix_unchecked(Matrix3::new(
        -rho / r,
        0.0,
        1.0 / r, //
        0.0,
        1.0,
        0.0, //
        1.0 / r,
        0.0,
        rho / r,
    ))
}

/// `T X T^T`: the target expressed in the canonical frame.
pub fn to_canonical_target(x: &RotationMatrix, pair: &CanonicalPair) -> RotationMatrix {
    x.conjugated_by(pair.t.matrix())
}

/// Converts a canonical parameter into the duration along the original
/// generator, reduced into `[0, period)`.
pub fn canonical_param_to_original(axis: Axis, theta: f64, pair: &CanonicalPair) -> f64 {
    let period = pair.original_period(axis);
    let tau = (theta / pair.scale(axis)).rem_euclid(period);
    if tau >= period {
        0.0
    } else {
        tau
    }
}
