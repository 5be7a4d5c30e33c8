//! Numerical tolerances shared by every stage of the pipeline.

use serde::{Deserialize, Serialize};

/// One context object for all tolerances.
///
/// [`Tolerances::scaled`] multiplies every field by the same factor so the
/// ratios between them stay fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Orthogonality / determinant checks on input matrices.
    pub validation: f64,
    /// Boundary snapping in the order function. Values this close to a
    /// region boundary count as on it, which selects the smaller count.
    pub snap: f64,
    /// Per-step tolerance: zero/period snapping of parameters, clamping of
    /// trigonometric solves.
    pub step: f64,
    /// Frobenius tolerance a factorization must reconstruct its target to.
    pub reconstruction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            validation: 1e-9,
            snap: 1e-9,
            step: 1e-10,
            reconstruction: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn scaled(factor: f64) -> Self {
        let d = Self::default();
        Self {
            validation: d.validation * factor,
            snap: d.snap * factor,
            step: d.step * factor,
            reconstruction: d.reconstruction * factor,
        }
    }
}
