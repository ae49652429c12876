use thiserror::Error;

use crate::paths::Side;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("path value not unitary at t = {t} (defect {defect:.3e})")]
    NonUnitaryPath { t: f64, defect: f64 },

    #[error("phase step of {step:.3} rad on side {side:?} exceeds pi/2 after {samples} samples")]
    PhaseJumpTooLarge { side: Side, step: f64, samples: usize },

    #[error("loop not closed: corner {from:?} -> {to:?} mismatch {mismatch:.3e}")]
    CornerMismatch { from: Side, to: Side, mismatch: f64 },

    #[error("ODE step control failed at x = {x} (step {step:.3e})")]
    SolverDiverged { x: f64, step: f64 },

    #[error("potential tail beyond |x| = {radius} contributes {tail:.3e} > {tolerance:.1e}")]
    DecayTooSlow { radius: f64, tail: f64, tolerance: f64 },

    #[error("zero-energy growth coefficient {growth:.3e} lies in the dead zone [1e-6, 1e-3]")]
    ClassificationAmbiguous { growth: f64 },

    #[error("extrapolated S(0) deviates from the {class} threshold form by {deviation:.3e}")]
    ThresholdMismatch { class: &'static str, deviation: f64 },

    #[error("bound-state count changed from {coarse} to {fine} when doubling the grid")]
    ResolutionInsufficient { coarse: usize, fine: usize },

    #[error("sector {0} requires a symmetric potential")]
    SymmetryRequired(&'static str),

    #[error("quadrature did not converge (last two estimates differ by {difference:.3e})")]
    QuadratureNotConverged { difference: f64 },

    #[error("golden mismatch in row '{row}', column {column}: got {got}, expected {expected}")]
    GoldenMismatch {
        row: String,
        column: String,
        got: f64,
        expected: f64,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
