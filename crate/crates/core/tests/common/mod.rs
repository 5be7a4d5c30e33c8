//! Shared fixtures: random sampling and the brute-force minimality oracle.
//!
//! The oracle builds its own generator matrices and exponentials with
//! nalgebra so it shares no code path with the factorizer it checks.

#![allow(dead_code)]

use std::f64::consts::PI;

use geneuler::{RotationMatrix, SkewGenerator, SuGenerator, Unitary2};
use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Rotation3, UnitQuaternion, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-uniform unit quaternion from four standard normals.
pub fn random_quaternion(rng: &mut impl Rng) -> [f64; 4] {
    loop {
        let q = [normal(rng), normal(rng), normal(rng), normal(rng)];
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-6 {
            return q.map(|v| v / n);
        }
    }
}

pub fn random_rotation(rng: &mut impl Rng) -> RotationMatrix {
    let [w, x, y, z] = random_quaternion(rng);
    let q = UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(w, x, y, z));
    let m: Matrix3<f64> = q.to_rotation_matrix().into_inner();
    RotationMatrix::new(m, 1e-12).expect("quaternion rotation")
}

pub fn random_generator(rng: &mut impl Rng) -> SkewGenerator {
    SkewGenerator::new(normal(rng), normal(rng), normal(rng))
}

pub fn random_su_generator(rng: &mut impl Rng) -> SuGenerator {
    SuGenerator::new(normal(rng), normal(rng), normal(rng))
}

/// Haar-uniform SU(2) element `[[a, -conj(b)], [b, conj(a)]]`.
pub fn random_su2(rng: &mut impl Rng) -> Unitary2 {
    let [w, x, y, z] = random_quaternion(rng);
    let a = Complex64::new(w, x);
    let b = Complex64::new(y, z);
    Unitary2::new(Matrix2::new(a, -b.conj(), b, a.conj()), 1e-12).expect("unit quaternion")
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Canonical generator matrices, written out directly.
pub fn oracle_generators(rho: f64) -> [Matrix3<f64>; 2] {
    let s12 = Matrix3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let s23 = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0);
    [s12, s12 * rho + s23]
}

fn vee(z: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(z[(2, 1)], z[(0, 2)], z[(1, 0)])
}

fn oracle_exp(z: &Matrix3<f64>, t: f64) -> Matrix3<f64> {
    Rotation3::from_scaled_axis(vee(z) * t).into_inner()
}

fn period(z: &Matrix3<f64>) -> f64 {
    2.0 * PI / vee(z).norm()
}

/// Alternating product pattern with `len` factors starting (leftmost) at
/// generator `first`.
fn pattern(first: usize, len: usize) -> Vec<usize> {
    (0..len).map(|i| (first + i) % 2).collect()
}

/// Levenberg-Marquardt on `|prod_i e^{Z_i t_i} - X|_F^2` from `t0`.
/// Returns the final Frobenius distance.
fn local_search(
    gens: &[Matrix3<f64>; 2],
    pat: &[usize],
    target: &Matrix3<f64>,
    t0: Vec<f64>,
) -> f64 {
    let n = pat.len();
    let eval = |t: &[f64]| -> (Vec<Matrix3<f64>>, Matrix3<f64>) {
        let exps: Vec<_> = pat
            .iter()
            .zip(t)
            .map(|(&g, &ti)| oracle_exp(&gens[g], ti))
            .collect();
        let p = exps.iter().fold(Matrix3::identity(), |acc, e| acc * e);
        (exps, p)
    };
    let mut t = t0;
    let (mut exps, mut p) = eval(&t);
    let mut cost = (p - target).norm_squared();
    let mut mu = 1e-2;
    for _ in 0..200 {
        if cost < 1e-20 {
            break;
        }
        // Jacobian columns: E1..E_{i-1} Z_i E_i..E_n.
        let mut prefix = vec![Matrix3::<f64>::identity(); n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] * exps[i];
        }
        let mut suffix = vec![Matrix3::<f64>::identity(); n + 1];
        for i in (0..n).rev() {
            suffix[i] = exps[i] * suffix[i + 1];
        }
        let mut jac = DMatrix::<f64>::zeros(9, n);
        for i in 0..n {
            let d = prefix[i] * gens[pat[i]] * suffix[i];
            for (k, v) in d.iter().enumerate() {
                jac[(k, i)] = *v;
            }
        }
        let r = DVector::from_iterator(9, (p - target).iter().copied());
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += mu * (1.0 + jtj[(i, i)]);
            }
            let Some(step) = a.lu().solve(&(-&jtr)) else {
                mu *= 10.0;
                continue;
            };
            let trial: Vec<f64> = t.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let (e2, p2) = eval(&trial);
            let c2 = (p2 - target).norm_squared();
            if c2 < cost {
                let gain = cost - c2;
                t = trial;
                exps = e2;
                p = p2;
                cost = c2;
                mu = (mu / 3.0).max(1e-12);
                improved = gain > 1e-16 * cost.max(1e-30);
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    cost.sqrt()
}

/// Result of a multi-start search over products of a fixed length.
#[derive(Debug, Clone, Copy)]
pub struct SearchResult {
    pub best_distance: f64,
    pub restarts: usize,
}

/// Multi-start search over alternating products of `len` factors (both
/// leading generators, `restarts` starts each). Stops early once a start
/// gets within `stop_below`.
pub fn multistart_distance(
    rho: f64,
    target: &RotationMatrix,
    len: usize,
    restarts: usize,
    seed: u64,
    stop_below: f64,
) -> SearchResult {
    let gens = oracle_generators(rho);
    let x = *target.matrix();
    if len == 0 {
        return SearchResult {
            best_distance: (x - Matrix3::identity()).norm(),
            restarts: 0,
        };
    }
    let mut r = rng(seed);
    let mut best = f64::INFINITY;
    let mut used = 0;
    for first in 0..2 {
        let pat = pattern(first, len);
        for _ in 0..restarts {
            let t0: Vec<f64> = pat
                .iter()
                .map(|&g| r.random_range(0.0..period(&gens[g])))
                .collect();
            let d = local_search(&gens, &pat, &x, t0);
            used += 1;
            best = best.min(d);
            if best < stop_below {
                return SearchResult {
                    best_distance: best,
                    restarts: used,
                };
            }
        }
    }
    SearchResult {
        best_distance: best,
        restarts: used,
    }
}
