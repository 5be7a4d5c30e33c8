//! Request payloads and their handlers. Each handler returns the serializable
//! result document.

use geneuler::canonical::to_canonical_target;
use geneuler::factorizer::{canonical_generator, factor_with_generators};
use geneuler::su2::factor_su2;
use geneuler::{
    build_sequence, canonicalize, factor_minimal, min_factors, reconstruct, so3, Axis,
    BilinearSystem, CanonicalPair, ControlSchedule, Factor, MinDecision, MinSequence,
    QuantumSystem, RotationMatrix, Segment, SkewGenerator, SuGenerator, Tolerances, Unitary2,
    Vector3,
};
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::CliError;

type Matrix = [[f64; 3]; 3];

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum GeneratorInput {
    Coefficients { c12: f64, c13: f64, c23: f64 },
    Matrix(Matrix),
}

impl GeneratorInput {
    fn resolve(&self, tol: &Tolerances) -> Result<SkewGenerator, CliError> {
        let g = match self {
            Self::Coefficients { c12, c13, c23 } => SkewGenerator::new(*c12, *c13, *c23),
            Self::Matrix(rows) => {
                let m = nalgebra_rows(rows);
                SkewGenerator::try_from_matrix(&m, tol.validation)?
            }
        };
        if !g.is_finite() {
            return Err(CliError::Malformed(
                "generator coefficients must be finite".into(),
            ));
        }
        Ok(g)
    }
}

fn nalgebra_rows(rows: &Matrix) -> Matrix3<f64> {
    Matrix3::from_fn(|r, c| rows[r][c])
}

fn rotation(rows: &Matrix, tol: &Tolerances) -> Result<RotationMatrix, CliError> {
    Ok(RotationMatrix::from_rows(*rows, tol.validation)?)
}

/// Either a canonical `rho` or a raw generator pair.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum PairInput {
    Canonical {
        rho: f64,
    },
    Generators {
        z1: GeneratorInput,
        z2: GeneratorInput,
    },
}

impl PairInput {
    fn generators(&self, tol: &Tolerances) -> Result<(SkewGenerator, SkewGenerator), CliError> {
        match self {
            Self::Canonical { rho } => {
                finite(*rho, "rho")?;
                Ok((
                    canonical_generator(Axis::Z1, *rho),
                    canonical_generator(Axis::Z2, *rho),
                ))
            }
            Self::Generators { z1, z2 } => Ok((z1.resolve(tol)?, z2.resolve(tol)?)),
        }
    }
}

fn finite(v: f64, name: &str) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Malformed(format!("{name} must be finite")))
    }
}

#[derive(Debug, Deserialize)]
pub struct CanonicalizeRequest {
    z1: GeneratorInput,
    z2: GeneratorInput,
}

pub fn canonicalize_cmd(
    req: CanonicalizeRequest,
    tol: &Tolerances,
) -> Result<CanonicalPair, CliError> {
    Ok(canonicalize(&req.z1.resolve(tol)?, &req.z2.resolve(tol)?)?)
}

#[derive(Debug, Deserialize)]
pub struct SequenceRequest {
    rho: f64,
}

pub fn sequence_cmd(req: SequenceRequest) -> Result<MinSequence, CliError> {
    Ok(build_sequence(req.rho)?)
}

#[derive(Debug, Deserialize)]
pub struct TargetRequest {
    target: Matrix,
    #[serde(flatten)]
    pair: PairInput,
}

pub fn min_count_cmd(req: TargetRequest, tol: &Tolerances) -> Result<MinDecision, CliError> {
    let x = rotation(&req.target, tol)?;
    match &req.pair {
        PairInput::Canonical { rho } => {
            finite(*rho, "rho")?;
            Ok(min_factors(&x, *rho, tol)?)
        }
        PairInput::Generators { z1, z2 } => {
            let pair = canonicalize(&z1.resolve(tol)?, &z2.resolve(tol)?)?;
            Ok(min_factors(&to_canonical_target(&x, &pair), pair.rho, tol)?)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FactorOutput {
    count: usize,
    factors: Vec<Factor>,
    residual_norm: f64,
}

pub fn factor_cmd(req: TargetRequest, tol: &Tolerances) -> Result<FactorOutput, CliError> {
    let x = rotation(&req.target, tol)?;
    let (factors, product) = match &req.pair {
        PairInput::Canonical { rho } => {
            finite(*rho, "rho")?;
            let f = factor_minimal(&x, *rho, tol)?;
            let p = reconstruct(&f);
            (f.factors, p)
        }
        PairInput::Generators { z1, z2 } => {
            let f = factor_with_generators(&x, &z1.resolve(tol)?, &z2.resolve(tol)?, tol)?;
            let p = f.reconstruct();
            (f.factors, p)
        }
    };
    Ok(FactorOutput {
        count: factors.len(),
        factors,
        residual_norm: product.frobenius_distance(&x),
    })
}

#[derive(Debug, Deserialize)]
pub struct LiftRequest {
    target: [[[f64; 2]; 2]; 2],
    z1: SuGenerator,
    z2: SuGenerator,
}

pub fn lift_su2_cmd(req: LiftRequest, tol: &Tolerances) -> Result<FactorOutput, CliError> {
    let u = Unitary2::from_pairs(req.target, tol.validation)?;
    let f = factor_su2(&u, &req.z1, &req.z2, tol)?;
    let residual_norm = f.reconstruct().distance(&u);
    Ok(FactorOutput {
        count: f.factors.len(),
        factors: f.factors,
        residual_norm,
    })
}

#[derive(Debug, Default, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    #[default]
    So3,
    Su2,
}

#[derive(Debug, Deserialize)]
pub struct SystemInput {
    a: serde_json::Value,
    b: serde_json::Value,
    m: f64,
    n: f64,
}

impl SystemInput {
    fn so3(&self, tol: &Tolerances) -> Result<BilinearSystem, CliError> {
        let a: GeneratorInput = parse_value(&self.a, "a")?;
        let b: GeneratorInput = parse_value(&self.b, "b")?;
        finite(self.m, "m")?;
        finite(self.n, "n")?;
        Ok(BilinearSystem::new(
            a.resolve(tol)?,
            b.resolve(tol)?,
            self.m,
            self.n,
        ))
    }

    fn su2(&self) -> Result<QuantumSystem, CliError> {
        let a: SuGenerator = parse_value(&self.a, "a")?;
        let b: SuGenerator = parse_value(&self.b, "b")?;
        finite(self.m, "m")?;
        finite(self.n, "n")?;
        Ok(QuantumSystem::new(a, b, self.m, self.n))
    }
}

fn parse_value<T: for<'de> Deserialize<'de>>(
    v: &serde_json::Value,
    name: &str,
) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Malformed(format!("{name}: {e}")))
}

#[derive(Debug, Deserialize)]
pub struct SynthesizeRequest {
    #[serde(default)]
    group: Group,
    system: SystemInput,
    target: serde_json::Value,
}

#[derive(Debug, Serialize)]
pub struct SynthesizeOutput {
    segments: Vec<Segment>,
    switches: usize,
    residual_norm: f64,
}

pub fn synthesize_cmd(
    req: SynthesizeRequest,
    tol: &Tolerances,
) -> Result<SynthesizeOutput, CliError> {
    let (sched, residual_norm) = match req.group {
        Group::So3 => {
            let sys = req.system.so3(tol)?;
            let rows: Matrix = parse_value(&req.target, "target")?;
            let x = rotation(&rows, tol)?;
            let sched = sys.synthesize(&x, tol)?;
            let r = sys.propagate(&sched).frobenius_distance(&x);
            (sched, r)
        }
        Group::Su2 => {
            let sys = req.system.su2()?;
            let pairs: [[[f64; 2]; 2]; 2] = parse_value(&req.target, "target")?;
            let u = Unitary2::from_pairs(pairs, tol.validation)?;
            let sched = sys.synthesize(&u, tol)?;
            let r = sys.propagate(&sched).distance(&u);
            (sched, r)
        }
    };
    Ok(SynthesizeOutput {
        switches: sched.switches(),
        segments: sched.segments,
        residual_norm,
    })
}

#[derive(Debug, Deserialize)]
pub struct SimulateRequest {
    system: SystemInput,
    schedule: ControlSchedule,
    #[serde(default = "south_pole_array")]
    x0: [f64; 3],
    #[serde(default = "default_samples")]
    samples_per_segment: usize,
}

fn south_pole_array() -> [f64; 3] {
    [0.0, 0.0, -1.0]
}

fn default_samples() -> usize {
    32
}

/// Samples `(t, x, y, z)` of a state trajectory.
#[derive(Debug, Serialize)]
pub struct Trajectory {
    pub final_state: [f64; 3],
    pub final_propagator: Matrix,
    pub trajectory: Vec<[f64; 4]>,
}

fn trajectory(
    sys: &BilinearSystem,
    sched: &ControlSchedule,
    x0: &Vector3,
    samples: usize,
) -> Result<Trajectory, CliError> {
    let pts = sys.propagate_state(sched, x0, samples)?;
    let last = pts.last().map(|(_, x)| *x).unwrap_or(*x0);
    Ok(Trajectory {
        final_state: [last.x, last.y, last.z],
        final_propagator: sys.propagate(sched).rows(),
        trajectory: pts.iter().map(|(t, x)| [*t, x.x, x.y, x.z]).collect(),
    })
}

pub fn simulate_cmd(req: SimulateRequest, tol: &Tolerances) -> Result<Trajectory, CliError> {
    let sys = req.system.so3(tol)?;
    let x0 = Vector3::from(req.x0);
    if !x0.iter().all(|v| v.is_finite()) {
        return Err(CliError::Malformed("x0 must be finite".into()));
    }
    trajectory(&sys, &req.schedule, &x0, req.samples_per_segment)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum PathSource {
    Schedule {
        system: SystemInput,
        schedule: ControlSchedule,
    },
    Factors {
        factors: Vec<Factor>,
        #[serde(flatten)]
        pair: PairInput,
    },
}

#[derive(Debug, Deserialize)]
pub struct SpherePathRequest {
    #[serde(flatten)]
    source: PathSource,
    #[serde(default = "default_samples")]
    samples_per_segment: usize,
}

/// `P(t) = X(t) P_s` along a factorization (rightmost factor acts first) or
/// a schedule.
pub fn sphere_path_cmd(req: SpherePathRequest, tol: &Tolerances) -> Result<Trajectory, CliError> {
    let p_s = so3::south_pole();
    match req.source {
        PathSource::Schedule { system, schedule } => {
            trajectory(&system.so3(tol)?, &schedule, &p_s, req.samples_per_segment)
        }
        PathSource::Factors { factors, pair } => {
            let (z1, z2) = pair.generators(tol)?;
            // A = Z1, B = Z2 - Z1 with levels 0 and 1 reproduces each subgroup.
            let sys = BilinearSystem::new(z1, z2 - z1, 0.0, 1.0);
            let segments = factors
                .iter()
                .rev()
                .map(|f| Segment {
                    u: match f.axis {
                        Axis::Z1 => 0.0,
                        Axis::Z2 => 1.0,
                    },
                    duration: f.parameter,
                })
                .collect();
            let sched = ControlSchedule { segments };
            trajectory(&sys, &sched, &p_s, req.samples_per_segment)
        }
    }
}
