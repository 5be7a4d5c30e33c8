//! Explicit minimum-length factorizations (generalized Euler angles).
//!
//! All solving happens in the canonical frame `Z1 = S12`,
//! `Z2 = rho*S12 + S23`. A target whose optimal factorization ends in `Z1`
//! is built as `X = Xp e^{Z1 ts}`, where the prefix `Xp` carries the South
//! Pole to `P_f = X P_s` and `ts` is read off the residual `Xp^T X`, which
//! then fixes the South Pole.
//!
//! Prefixes are a backbone of half-turns that climbs the ladder of
//! [`crate::minimality`], followed by one or two solved factors:
//!
//! ```text
//! odd  2k+3:  e^{Z1 t1} e^{Z2 t2} (H1 H2)^k           e^{Z1 ts}
//! even 2k+2:  e^{Z2 t1} e^{Z1 t2} H2 (H1 H2)^{k-1}    e^{Z1 ts}
//! ```
//!
//! with `H1 = e^{Z1 pi}` and `H2 = e^{Z2 pi / sqrt(1 + rho^2)}` the rotations
//! by angle `pi` about each axis. Every solved step fixes one scalar in
//! closed form. Targets best ended in `Z2` are reflected by `T~`, factored,
//! and mapped back.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::canonical::{
    canonical_param_to_original, canonicalize, tilde_reflection, to_canonical_target,
};
use crate::error::{Error, Result};
use crate::minimality::{both_orders, OrderValue};
use crate::so3::{exp_rot, south_pole, RotationMatrix, SkewGenerator, Vector3};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    Z1,
    Z2,
}

impl Axis {
    pub fn other(self) -> Self {
        match self {
            Axis::Z1 => Axis::Z2,
            Axis::Z2 => Axis::Z1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub axis: Axis,
    pub parameter: f64,
}

impl Factor {
    pub fn new(axis: Axis, parameter: f64) -> Self {
        Self { axis, parameter }
    }
}

/// Leftmost-first product `e^{Z_a1 t1} e^{Z_a2 t2} ...` over the canonical
/// generators for `rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub rho: f64,
    pub factors: Vec<Factor>,
}

impl Factorization {
    pub fn new(rho: f64, factors: Vec<Factor>) -> Self {
        Self { rho, factors }
    }

    pub fn empty(rho: f64) -> Self {
        Self::new(rho, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn generator(&self, axis: Axis) -> SkewGenerator {
        canonical_generator(axis, self.rho)
    }

    pub fn period(&self, axis: Axis) -> f64 {
        canonical_period(axis, self.rho)
    }
}

pub fn canonical_generator(axis: Axis, rho: f64) -> SkewGenerator {
    match axis {
        Axis::Z1 => SkewGenerator::s12(),
        Axis::Z2 => SkewGenerator::canonical_z2(rho),
    }
}

pub fn canonical_period(axis: Axis, rho: f64) -> f64 {
    match axis {
        Axis::Z1 => 2.0 * PI,
        Axis::Z2 => 2.0 * PI / (1.0 + rho * rho).sqrt(),
    }
}

pub fn reconstruct(f: &Factorization) -> RotationMatrix {
    product(&f.factors, |axis| f.generator(axis))
}

fn product(factors: &[Factor], generator: impl Fn(Axis) -> SkewGenerator) -> RotationMatrix {
    factors.iter().fold(RotationMatrix::identity(), |acc, fac| {
        acc * exp_rot(&generator(fac.axis), fac.parameter)
    })
}

/// Reduces `t` into `[0, period)`; `None` when it is within `tol` of a
/// multiple of the period.
fn reduce(t: f64, period: f64, tol: f64) -> Option<f64> {
    let r = t.rem_euclid(period);
    (r >= tol && r <= period - tol).then_some(r)
}

fn normalize_factors(factors: &[Factor], period: impl Fn(Axis) -> f64, tol: f64) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::with_capacity(factors.len());
    for fac in factors {
        let p = period(fac.axis);
        let Some(t) = reduce(fac.parameter, p, tol) else {
            continue;
        };
        match out.last() {
            Some(top) if top.axis == fac.axis => {
                let merged = reduce(top.parameter + t, p, tol);
                out.pop();
                if let Some(m) = merged {
                    out.push(Factor::new(fac.axis, m));
                }
            }
            _ => out.push(Factor::new(fac.axis, t)),
        }
    }
    out
}

/// Reduces parameters into `[0, period)`, drops trivial factors and merges
/// neighbours on the same axis. Idempotent.
pub fn normalize(f: &Factorization, tol: f64) -> Factorization {
    let rho = f.rho;
    Factorization::new(
        rho,
        normalize_factors(&f.factors, |a| canonical_period(a, rho), tol),
    )
}

/// Given a factorization of `T~ X T~^T`, returns one of `X` with the same
/// length, using `T~ e^{Z1 t} T~ = e^{-Z2 t / r}` and
/// `T~ e^{Z2 t} T~ = e^{-r Z1 t}`, `r = sqrt(1 + rho^2)`.
pub fn map_back_reflected(f: &Factorization, tol: f64) -> Factorization {
    let r = (1.0 + f.rho * f.rho).sqrt();
    let mapped = f
        .factors
        .iter()
        .map(|fac| match fac.axis {
            Axis::Z1 => Factor::new(Axis::Z2, -fac.parameter / r),
            Axis::Z2 => Factor::new(Axis::Z1, -r * fac.parameter),
        })
        .collect::<Vec<_>>();
    normalize(&Factorization::new(f.rho, mapped), tol)
}

/// Geometry of the canonical pair on the unit sphere.
struct Frame {
    rho: f64,
    /// Unit rotation axes and angular rates of `e^{Z1 t}` and `e^{Z2 t}`.
    axes: [(Vector3, f64); 2],
}

impl Frame {
    fn new(rho: f64) -> Self {
        let axes = [Axis::Z1, Axis::Z2].map(|a| {
            let g = canonical_generator(a, rho);
            let w = g.axis_vector();
            (w / w.norm(), g.speed())
        });
        Self { rho, axes }
    }

    fn unit_axis(&self, axis: Axis) -> &Vector3 {
        &self.axes[axis as usize].0
    }

    /// Parameter of `e^{Z t}` realizing a rotation by `angle`.
    fn param(&self, axis: Axis, angle: f64) -> f64 {
        angle / self.axes[axis as usize].1
    }

    fn half_turn(&self, axis: Axis) -> Factor {
        Factor::new(axis, self.param(axis, PI))
    }

    fn exp(&self, axis: Axis, t: f64) -> RotationMatrix {
        exp_rot(&canonical_generator(axis, self.rho), t)
    }

    fn product(&self, factors: &[Factor]) -> RotationMatrix {
        product(factors, |a| canonical_generator(a, self.rho))
    }

    /// `half_turns` alternating half-turns, leftmost-first, ending in `Z2`.
    fn backbone(&self, half_turns: usize) -> Vec<Factor> {
        (0..half_turns)
            .map(|i| {
                let axis = if (half_turns - i) % 2 == 1 {
                    Axis::Z2
                } else {
                    Axis::Z1
                };
                self.half_turn(axis)
            })
            .collect()
    }
}

/// Angle of the rotation about the unit axis `n` that carries `p` onto the
/// circle through `q`, aligned with `q`.
fn angle_about(n: &Vector3, p: &Vector3, q: &Vector3) -> f64 {
    let pp = p - n * n.dot(p);
    let qp = q - n * n.dot(q);
    if pp.norm() < 1e-300 || qp.norm() < 1e-300 {
        return 0.0;
    }
    n.dot(&pp.cross(&qp)).atan2(pp.dot(&qp))
}

/// Rotation angles about `n` that bring `p` to height `h`: the roots of
/// `a + b cos(x) + c sin(x) = h`. Heights beyond the reachable range (by at
/// most `slack`) are clamped to the nearest extreme.
fn angles_to_height(n: &Vector3, p: &Vector3, h: f64, slack: f64) -> Vec<f64> {
    let along = n * n.dot(p);
    let a = along.z;
    let b = p.z - a;
    let c = n.cross(p).z;
    let amp = b.hypot(c);
    if amp < 1e-300 {
        return vec![0.0];
    }
    let ratio = (h - a) / amp;
    if ratio.abs() > 1.0 + slack / amp {
        return Vec::new();
    }
    let phase = c.atan2(b);
    let spread = ratio.clamp(-1.0, 1.0).acos();
    if spread == 0.0 {
        vec![phase]
    } else {
        vec![phase + spread, phase - spread]
    }
}

/// Points at height `z` on the sphere lying on the `n`-circle of `pf`, i.e.
/// on the plane `(x - pf.x) + rho (z - pf.z) = 0`.
fn plane_circle_points(rho: f64, pf: &Vector3, z: f64, slack: f64) -> Vec<Vector3> {
    let x = pf.x + rho * (pf.z - z);
    let ring = (1.0 - z * z).max(0.0);
    let y2 = ring - x * x;
    if y2 >= 0.0 {
        let y = y2.sqrt();
        if y == 0.0 {
            return vec![Vector3::new(x, 0.0, z)];
        }
        return vec![Vector3::new(x, y, z), Vector3::new(x, -y, z)];
    }
    // The plane misses the ring; accept tangency within the slack.
    let radius = ring.sqrt();
    if x.abs() - radius > slack {
        return Vec::new();
    }
    vec![Vector3::new(radius.copysign(x), 0.0, z)]
}

/// Candidate prefixes carrying the South Pole to `pf` with `count - 1`
/// factors, leftmost-first, ending in `Z2`.
fn candidate_prefixes(
    frame: &Frame,
    order: OrderValue,
    pf: &Vector3,
    slack: f64,
) -> Vec<Vec<Factor>> {
    let ps = south_pole();
    let n1 = frame.unit_axis(Axis::Z1);
    let n2 = frame.unit_axis(Axis::Z2);
    let count = order.count;
    let k = order.ktilde;
    match count {
        0 | 1 => vec![Vec::new()],
        2 => vec![vec![Factor::new(
            Axis::Z2,
            frame.param(Axis::Z2, angle_about(n2, &ps, pf)),
        )]],
        c if c % 2 == 0 => {
            // Backbone H2 (H1 H2)^{k-1} lifts the pole to the ladder point P_k.
            let backbone = frame.backbone(2 * k - 1);
            let pk = frame.product(&backbone).apply(&ps);
            plane_circle_points(frame.rho, pf, pk.z, slack)
                .into_iter()
                .map(|bar| {
                    let t2 = frame.param(Axis::Z1, angle_about(n1, &pk, &bar));
                    let t1 = frame.param(Axis::Z2, angle_about(n2, &bar, pf));
                    let mut prefix = vec![Factor::new(Axis::Z2, t1), Factor::new(Axis::Z1, t2)];
                    prefix.extend(backbone.iter().copied());
                    prefix
                })
                .collect()
        }
        _ => {
            // Backbone (H1 H2)^k places the pole at Q_k, whose n-circle
            // sweeps every height up to z_{k+1}.
            let backbone = frame.backbone(2 * k);
            let qk = frame.product(&backbone).apply(&ps);
            angles_to_height(n2, &qk, pf.z, slack)
                .into_iter()
                .map(|alpha| {
                    let lifted = frame.exp(Axis::Z2, frame.param(Axis::Z2, alpha)).apply(&qk);
                    let t1 = frame.param(Axis::Z1, angle_about(n1, &lifted, pf));
                    let mut prefix = vec![
                        Factor::new(Axis::Z1, t1),
                        Factor::new(Axis::Z2, frame.param(Axis::Z2, alpha)),
                    ];
                    prefix.extend(backbone.iter().copied());
                    prefix
                })
                .collect()
        }
    }
}

/// Factors `y` (canonical frame) with a rightmost `Z1` factor and the given
/// order value. Branches are tried in order; the first that reconstructs
/// within tolerance wins.
fn solve_z1_last(
    y: &RotationMatrix,
    rho: f64,
    order: OrderValue,
    tol: &Tolerances,
) -> Result<Vec<Factor>> {
    if order.count == 0 {
        return Ok(Vec::new());
    }
    let frame = Frame::new(rho);
    let pf = y.south_pole_image();
    let mut best: Option<(f64, Vec<Factor>)> = None;
    for mut prefix in candidate_prefixes(&frame, order, &pf, tol.snap) {
        let residual = frame.product(&prefix).transpose() * *y;
        // residual ~ e^{S12 ts} = [[cos, sin, 0], [-sin, cos, 0], [0, 0, 1]]
        let ts = residual.get(0, 1).atan2(residual.get(0, 0));
        prefix.push(Factor::new(Axis::Z1, ts));
        let err = frame.product(&prefix).frobenius_distance(y);
        if err <= tol.reconstruction {
            return Ok(prefix);
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, prefix));
        }
    }
    Err(Error::InternalSolverFailure(match best {
        Some((err, _)) => format!(
            "no branch of the {}-factor construction reconstructs the target (best residual {err:e})",
            order.count
        ),
        None => format!("the {}-factor construction has no real branch", order.count),
    }))
}

/// Minimum-length factorization of `x` over the canonical pair for `rho`.
pub fn factor_minimal(x: &RotationMatrix, rho: f64, tol: &Tolerances) -> Result<Factorization> {
    if !rho.is_finite() {
        return Err(Error::input("rho must be finite"));
    }
    if x.frobenius_distance(&RotationMatrix::identity()) <= tol.snap {
        return Ok(Factorization::empty(rho));
    }
    let (direct, reflected) = both_orders(x, rho, tol.snap)?;
    let result = if direct.count <= reflected.count {
        let factors = solve_z1_last(x, rho, direct, tol)?;
        normalize(&Factorization::new(rho, factors), tol.step)
    } else {
        let y = x.conjugated_by(tilde_reflection(rho).matrix());
        let factors = solve_z1_last(&y, rho, reflected, tol)?;
        map_back_reflected(&Factorization::new(rho, factors), tol.step)
    };
    let err = reconstruct(&result).frobenius_distance(x);
    if err > tol.reconstruction {
        return Err(Error::InternalSolverFailure(format!(
            "factorization residual {err:e} exceeds {:e}",
            tol.reconstruction
        )));
    }
    Ok(result)
}

/// Factorization over an arbitrary independent generator pair, with
/// parameters expressed along the original generators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairFactorization {
    pub z1: SkewGenerator,
    pub z2: SkewGenerator,
    /// Invariant of the pair after canonicalization.
    pub rho: f64,
    pub factors: Vec<Factor>,
}

impl PairFactorization {
    pub fn generator(&self, axis: Axis) -> SkewGenerator {
        match axis {
            Axis::Z1 => self.z1,
            Axis::Z2 => self.z2,
        }
    }

    pub fn reconstruct(&self) -> RotationMatrix {
        product(&self.factors, |a| self.generator(a))
    }
}

pub fn factor_with_generators(
    x: &RotationMatrix,
    z1: &SkewGenerator,
    z2: &SkewGenerator,
    tol: &Tolerances,
) -> Result<PairFactorization> {
    let pair = canonicalize(z1, z2)?;
    let y = to_canonical_target(x, &pair);
    let canonical = factor_minimal(&y, pair.rho, tol)?;
    let converted = canonical
        .factors
        .iter()
        .map(|f| {
            Factor::new(
                f.axis,
                canonical_param_to_original(f.axis, f.parameter, &pair),
            )
        })
        .collect::<Vec<_>>();
    let factors = normalize_factors(&converted, |a| pair.original_period(a), tol.step);
    Ok(PairFactorization {
        z1: *z1,
        z2: *z2,
        rho: pair.rho,
        factors,
    })
}
