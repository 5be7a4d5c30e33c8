//! Minimum number of factors for a target in the canonical frame.
//!
//! On the unit sphere `e^{S12 t}` turns about the z axis and
//! `e^{(rho*S12 + S23) t}` about `n = (1, 0, rho)`. Starting from the South
//! Pole and alternating half-turns about the two axes, the heights reached
//! after each pair of switches form the ladder `z_0 < z_1 < ...`:
//!
//! ```text
//! z_0 = f_0 = -1
//! f_k     = sqrt(1 - z_k^2) / |rho| + z_k
//! z_{k+1} = 2 rho^2 / (1 + rho^2) * f_k - z_k
//! ```
//!
//! `f_k` is where the plane of the next `n`-circle crosses the z axis; the
//! ladder stops at the first `kbar` with `f_kbar >= 1`. The height of the
//! target's South Pole image against this ladder, plus a side-of-plane test,
//! fixes the count.

use serde::Serialize;

use crate::canonical::tilde_reflection;
use crate::error::{Error, Result};
use crate::factorizer::Axis;
use crate::so3::RotationMatrix;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinSequence {
    pub rho: f64,
    pub z: Vec<f64>,
    pub f: Vec<f64>,
    pub kbar: usize,
    /// Constant angular step: `z_k = -cos(k * beta)`.
    pub beta: f64,
}

impl MinSequence {
    /// Largest order value any target can have for this `rho`.
    pub fn max_order(&self) -> usize {
        2 * self.kbar + 3
    }
}

/// Slack on the termination test `f_k >= 1`, covering rounding in the
/// recurrences (exactly `f_1 = 1` at `|rho| = 1`).
const TERMINATION_SLACK: f64 = 1e-14;

pub fn build_sequence(rho: f64) -> Result<MinSequence> {
    if !rho.is_finite() {
        return Err(Error::input("rho must be finite"));
    }
    if rho == 0.0 {
        return Err(Error::input(
            "the ladder is undefined for rho = 0 (orthogonal generators use the classical Euler resolution)",
        ));
    }
    let rho2 = rho * rho;
    let abs_rho = rho.abs();
    let gain = 2.0 * rho2 / (1.0 + rho2);
    // Heights grow by more than 2/(1+rho^2) per step.
    let max_steps = (1.0 + rho2).ceil() as usize + 8;

    let mut z = vec![-1.0];
    let mut f = vec![-1.0];
    loop {
        let k = z.len() - 1;
        if k >= 1 && f[k] >= 1.0 - TERMINATION_SLACK {
            break;
        }
        if k > max_steps {
            return Err(Error::InternalSolverFailure(format!(
                "ladder for rho = {rho} did not terminate within {max_steps} steps"
            )));
        }
        let z_next = gain * f[k] - z[k];
        let z_next = z_next.clamp(-1.0, 1.0);
        let f_next = (1.0 - z_next * z_next).max(0.0).sqrt() / abs_rho + z_next;
        z.push(z_next);
        f.push(f_next);
    }
    let kbar = z.len() - 1;
    let beta = ((rho2 - 1.0) / (rho2 + 1.0)).acos();
    Ok(MinSequence {
        rho,
        z,
        f,
        kbar,
        beta,
    })
}

/// Order value of a target together with the ladder index it falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderValue {
    pub count: usize,
    pub ktilde: usize,
}

/// Minimum count of a factorization whose rightmost factor is a nontrivial
/// `e^{S12 t}`.
///
/// Boundary tests snap within `snap` toward the smaller count. Plane tests
/// compare Euclidean distances to the plane.
pub fn order_value(x: &RotationMatrix, seq: &MinSequence, snap: f64) -> OrderValue {
    let rho = seq.rho;
    let x13 = x.get(0, 2);
    let x23 = x.get(1, 2);
    let x33 = x.get(2, 2);
    let height = -x33;
    let r = (1.0 + rho * rho).sqrt();

    if x33 > 0.0 && x13.hypot(x23) <= snap {
        return OrderValue {
            count: 1,
            ktilde: 0,
        };
    }
    if height <= seq.z[1] + snap {
        // Distance to the plane x + rho (z + 1) = 0 through the South Pole.
        let off_plane = (x13 - rho * (1.0 - x33)).abs() / r;
        let count = if off_plane <= snap { 2 } else { 3 };
        return OrderValue { count, ktilde: 0 };
    }
    let ktilde = seq
        .z
        .iter()
        .rposition(|&zk| zk < height - snap)
        .unwrap_or(0);
    let fk = seq.f[ktilde];
    // Signed distance above the plane x + rho (z - f_k) = 0, oriented by rho.
    let above = -(rho.signum() * x13 + rho.abs() * (x33 + fk)) / r;
    let count = if above <= snap {
        2 * ktilde + 2
    } else {
        2 * ktilde + 3
    };
    OrderValue { count, ktilde }
}

/// Order value for orthogonal generators (`rho = 0`): the classical Euler
/// resolution needs at most three factors.
fn euler_order(x: &RotationMatrix, snap: f64) -> OrderValue {
    let x13 = x.get(0, 2);
    let x23 = x.get(1, 2);
    let count = if x.get(2, 2) > 0.0 && x13.hypot(x23) <= snap {
        1
    } else if x13.abs() <= snap {
        2
    } else {
        3
    };
    OrderValue { count, ktilde: 0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinDecision {
    pub count: usize,
    /// Axis of the rightmost factor; `None` for the identity.
    pub last_axis: Option<Axis>,
    pub ktilde: usize,
}

fn is_identity(x: &RotationMatrix, tol: f64) -> bool {
    x.frobenius_distance(&RotationMatrix::identity()) <= tol
}

/// Order values of `x` and of its reflection `T~ x T~^T`.
pub(crate) fn both_orders(
    x: &RotationMatrix,
    rho: f64,
    snap: f64,
) -> Result<(OrderValue, OrderValue)> {
    let reflected = x.conjugated_by(tilde_reflection(rho).matrix());
    if rho == 0.0 {
        return Ok((euler_order(x, snap), euler_order(&reflected, snap)));
    }
    let seq = build_sequence(rho)?;
    Ok((
        order_value(x, &seq, snap),
        order_value(&reflected, &seq, snap),
    ))
}

/// Minimum factor count of `x` over both choices of rightmost axis.
pub fn min_factors(x: &RotationMatrix, rho: f64, tol: &Tolerances) -> Result<MinDecision> {
    if !rho.is_finite() {
        return Err(Error::input("rho must be finite"));
    }
    if is_identity(x, tol.snap) {
        return Ok(MinDecision {
            count: 0,
            last_axis: None,
            ktilde: 0,
        });
    }
    let (direct, reflected) = both_orders(x, rho, tol.snap)?;
    Ok(if direct.count <= reflected.count {
        MinDecision {
            count: direct.count,
            last_axis: Some(Axis::Z1),
            ktilde: direct.ktilde,
        }
    } else {
        MinDecision {
            count: reflected.count,
            last_axis: Some(Axis::Z2),
            ktilde: reflected.ktilde,
        }
    })
}
