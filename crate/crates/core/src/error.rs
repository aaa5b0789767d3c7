use thiserror::Error;

/// Errors raised by the geometric routines.
///
/// Numeric payloads are carried as `f64` whatever the working precision.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("subspace is not coisotropic: {reason}")]
    NotCoisotropic {
        reason: String,
        /// A vector of the symplectic complement together with its component
        /// outside the subspace, when the failure is a containment failure.
        witness: Option<(Vec<f64>, Vec<f64>)>,
    },

    #[error("hint column {column} projects to norm {norm:e}; refine the sampling")]
    ContinuityLoss { column: usize, norm: f64 },

    #[error("loop is discontinuous: step {max_step:.4} rad with {samples} samples exceeds the refinement budget")]
    DiscontinuousLoop { max_step: f64, samples: usize },

    #[error("loop does not close: defect {defect:e}")]
    OpenLoop { defect: f64 },

    #[error("phase jump of {jump:.4} rad at sample {index} aliases the winding")]
    Aliasing { index: usize, jump: f64 },

    #[error("winding residual {residual:.4} is not close to an integer")]
    Closure { residual: f64 },

    #[error("degenerate frame contraction of norm {norm:e}")]
    FrameDegeneracy { norm: f64 },

    #[error("sample grids differ: expected {expected}, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("point lies off the submanifold by {residual:e}")]
    OffSurface { residual: f64 },

    #[error("defining function gradient has norm {norm}, expected 1")]
    Unnormalized { norm: f64 },

    #[error("numerical quality: {0}")]
    NumericalQuality(String),

    #[error("internal consistency: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
