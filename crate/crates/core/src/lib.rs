//! Minimum-length factorizations of rotations into alternating products of
//! exponentials along two fixed generators, and bang-bang control synthesis
//! for bilinear systems on SO(3) and SU(2).
//!
//! Given linearly independent `Z1, Z2` in so(3), every rotation `X` can be
//! written as `X = e^{Z1 t1} e^{Z2 t2} e^{Z1 t3} ...`. The parameters are the
//! generalized Euler angles. This crate computes the minimum number of
//! factors as a function of `X`, constructs a factorization attaining it, and
//! turns it into a two-valued control schedule.
//!
//! Layout:
//! - [`so3`]: skew generators, rotation matrices, exponential and logarithm.
//! - [`canonical`]: reduction of a generator pair to `(S12, rho*S12 + S23)`.
//! - [`minimality`]: the z/f ladder sequences and the minimum factor count.
//! - [`factorizer`]: explicit minimum-length factorizations.
//! - [`su2`]: the double cover and sign-corrected SU(2) factorizations.
//! - [`control`]: bilinear systems, schedules, exact propagation.

pub mod canonical;
pub mod control;
pub mod error;
pub mod factorizer;
pub mod minimality;
pub mod so3;
pub mod su2;
pub mod tolerance;

pub use canonical::{canonicalize, tilde_reflection, CanonicalPair};
pub use control::{BilinearSystem, ControlSchedule, QuantumSystem, Segment};
pub use error::{Error, Result};
pub use factorizer::{factor_minimal, reconstruct, Axis, Factor, Factorization};
pub use minimality::{build_sequence, min_factors, MinDecision, MinSequence};
pub use so3::{exp_rot, log_rot, OrthogonalMatrix, RotationMatrix, SkewGenerator, Vector3};
pub use su2::{SuGenerator, Unitary2};
pub use tolerance::Tolerances;
