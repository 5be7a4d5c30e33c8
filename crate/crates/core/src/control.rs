//! Bang-bang control of `x' = (A + B u) x` with `u` in `{M, N}`.
//!
//! With `Z1 = A + B M` and `Z2 = A + B N`, a factorization
//! `X = e^{Z1 t1} e^{Z2 t2} ... e^{Z tn}` is realized by applying the
//! rightmost factor first: `u = (value of Z_n)` for `t_n`, then the next one
//! to its left, and so on. Fewer factors means fewer switches.

use serde::{Deserialize, Serialize};

use crate::canonical::canonicalize;
use crate::error::{Error, Result};
use crate::factorizer::{factor_with_generators, Axis, Factor};
use crate::so3::{exp_rot, RotationMatrix, SkewGenerator, Vector3};
use crate::su2::{exp_su, factor_su2, SuGenerator, Unitary2};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub u: f64,
    pub duration: f64,
}

/// Time-ordered piecewise-constant control.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlSchedule {
    pub segments: Vec<Segment>,
}

impl ControlSchedule {
    pub fn switches(&self) -> usize {
        self.segments.len().saturating_sub(1)
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Drops zero-length segments and merges neighbours with equal values.
    pub fn normalized(&self, tol: f64) -> Self {
        let mut out: Vec<Segment> = Vec::with_capacity(self.segments.len());
        for seg in self.segments.iter().filter(|s| s.duration > tol) {
            match out.last_mut() {
                Some(last) if last.u == seg.u => last.duration += seg.duration,
                _ => out.push(*seg),
            }
        }
        Self { segments: out }
    }

    fn from_factors(factors: &[Factor], m: f64, n: f64, tol: f64) -> Self {
        let segments = factors
            .iter()
            .rev()
            .map(|f| Segment {
                u: match f.axis {
                    Axis::Z1 => m,
                    Axis::Z2 => n,
                },
                duration: f.parameter,
            })
            .collect();
        Self { segments }.normalized(tol)
    }

    fn validate(&self) -> Result<()> {
        for s in &self.segments {
            if !(s.u.is_finite() && s.duration.is_finite()) || s.duration < 0.0 {
                return Err(Error::input(
                    "segments need finite values and nonnegative durations",
                ));
            }
        }
        Ok(())
    }
}

/// `x' = (A + B u) x` on SO(3) (rigid body, lossless networks).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearSystem {
    pub a: SkewGenerator,
    pub b: SkewGenerator,
    pub m: f64,
    pub n: f64,
}

impl BilinearSystem {
    pub fn new(a: SkewGenerator, b: SkewGenerator, m: f64, n: f64) -> Self {
        Self { a, b, m, n }
    }

    pub fn generator_at(&self, u: f64) -> SkewGenerator {
        self.a + self.b * u
    }

    /// `(A + B M, A + B N)`, which must be linearly independent.
    pub fn generators(&self) -> Result<(SkewGenerator, SkewGenerator)> {
        let z1 = self.generator_at(self.m);
        let z2 = self.generator_at(self.n);
        match canonicalize(&z1, &z2) {
            Ok(_) => Ok((z1, z2)),
            Err(Error::DependentGenerators) => Err(Error::NotControllableWithTwoLevels),
            Err(Error::InvalidInput(_)) if z1.is_zero() => Err(Error::NotControllableWithTwoLevels),
            Err(e) => Err(e),
        }
    }

    /// Minimum-switch schedule steering the identity to `target`.
    pub fn synthesize(&self, target: &RotationMatrix, tol: &Tolerances) -> Result<ControlSchedule> {
        let (z1, z2) = self.generators()?;
        let f = factor_with_generators(target, &z1, &z2, tol)?;
        Ok(ControlSchedule::from_factors(
            &f.factors, self.m, self.n, tol.step,
        ))
    }

    /// Exact piecewise-exponential solution `X(T)` of `X' = (A + B u) X`,
    /// `X(0) = I`.
    pub fn propagate(&self, sched: &ControlSchedule) -> RotationMatrix {
        sched
            .segments
            .iter()
            .fold(RotationMatrix::identity(), |x, s| {
                exp_rot(&self.generator_at(s.u), s.duration) * x
            })
    }

    /// Samples `x(t) = X(t) x0` at `samples_per_segment` uniform times inside
    /// each segment (segment end included), after the initial sample at 0.
    pub fn propagate_state(
        &self,
        sched: &ControlSchedule,
        x0: &Vector3,
        samples_per_segment: usize,
    ) -> Result<Vec<(f64, Vector3)>> {
        if samples_per_segment == 0 {
            return Err(Error::input("samples_per_segment must be at least 1"));
        }
        sched.validate()?;
        let mut out = vec![(0.0, *x0)];
        let mut t0 = 0.0;
        let mut x = *x0;
        for seg in &sched.segments {
            let z = self.generator_at(seg.u);
            for j in 1..=samples_per_segment {
                let dt = seg.duration * j as f64 / samples_per_segment as f64;
                out.push((t0 + dt, exp_rot(&z, dt).apply(&x)));
            }
            x = exp_rot(&z, seg.duration).apply(&x);
            t0 += seg.duration;
        }
        Ok(out)
    }
}

/// A two-level quantum system `x' = (A + B u) x` with `A, B` in su(2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumSystem {
    pub a: SuGenerator,
    pub b: SuGenerator,
    pub m: f64,
    pub n: f64,
}

impl QuantumSystem {
    pub fn new(a: SuGenerator, b: SuGenerator, m: f64, n: f64) -> Self {
        Self { a, b, m, n }
    }

    pub fn generator_at(&self, u: f64) -> SuGenerator {
        self.a + self.b * u
    }

    pub fn synthesize(&self, target: &Unitary2, tol: &Tolerances) -> Result<ControlSchedule> {
        let (z1, z2) = (self.generator_at(self.m), self.generator_at(self.n));
        let f = factor_su2(target, &z1, &z2, tol).map_err(|e| match e {
            Error::DependentGenerators => Error::NotControllableWithTwoLevels,
            Error::InvalidInput(_) if z1.rate() == 0.0 => Error::NotControllableWithTwoLevels,
            other => other,
        })?;
        Ok(ControlSchedule::from_factors(
            &f.factors, self.m, self.n, tol.step,
        ))
    }

    pub fn propagate(&self, sched: &ControlSchedule) -> Unitary2 {
        sched.segments.iter().fold(Unitary2::identity(), |x, s| {
            exp_su(&self.generator_at(s.u), s.duration) * x
        })
    }
}
