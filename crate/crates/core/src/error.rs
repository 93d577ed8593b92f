use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("truncation insufficient: tail mass {tail:.3e} exceeds tolerance {tolerance:.1e} at dim {dim}")]
    TruncationInsufficient { tail: f64, tolerance: f64, dim: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("reconstruction residual {residual:.3e} exceeds tolerance {tolerance:.1e}; widen the shift range")]
    ReconstructionResidual { residual: f64, tolerance: f64 },

    #[error("phase grid too coarse: spacing {spacing:.3e} rad, need at most {required:.3e} (try n_points >= {suggested_points})")]
    GridTooCoarse { spacing: f64, required: f64, suggested_points: usize },

    #[error("Holevo phase uncertainty undefined: neighbour amplitude sum vanishes")]
    PhaseUncertaintyUndefined,

    #[error("shifted state has zero norm (shift {shift} exceeds populated support)")]
    ZeroNorm { shift: i64 },

    #[error("invalid error window: G + L = {sum} but d_N - 1 = {expected}")]
    Window { sum: i64, expected: i64 },

    #[error("decision candidates collide at angle {angle}")]
    CandidateCollision { angle: f64 },

    #[error("channel is not completely positive (Choi eigenvalue {eigenvalue:.3e})")]
    NotCompletelyPositive { eigenvalue: f64 },

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("repeater spacing too large: per-hop loss Gamma = {gamma} >= 1")]
    SpacingTooLarge { gamma: f64 },

    #[error("optimization failed: all {evaluations} evaluations errored (first: {first_error})")]
    OptimizationFailed { evaluations: usize, first_error: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
