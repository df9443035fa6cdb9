use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("u-coordinate {index} is zero; the Log map is undefined there")]
    ZeroCoordinate { index: usize },

    #[error("no sign change bracketed on t in [{lo}, {hi}] (h(lo) = {h_lo}, h(hi) = {h_hi})")]
    NoBracket { lo: f64, hi: f64, h_lo: f64, h_hi: f64 },

    #[error("constraint differential is rank deficient (smallest singular value {sigma_min:e})")]
    RankDeficient { sigma_min: f64 },

    #[error("projection onto the constraint failed to converge (residual {residual:e})")]
    ProjectionFailed { residual: f64 },

    #[error("boundary composite d_{degree} . d_{next} is nonzero")]
    BoundarySquareNonzero { degree: usize, next: usize },

    #[error("chain map fails to commute with differentials in degree {degree}")]
    NotAChainMap { degree: usize },

    #[error("matrix shape {rows}x{cols} does not match generator counts {expected_rows}x{expected_cols} in degree {degree}")]
    MatrixShape {
        degree: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("homology has torsion in degree {degree}; exactness over Z is checked only for free groups")]
    TorsionUnsupported { degree: usize },

    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: String, right: String },

    #[error("identity `{identity}` failed; residual {residual}")]
    IdentityFailed { identity: String, residual: String },
}
