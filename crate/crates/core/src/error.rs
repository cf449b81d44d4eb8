use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not skew-symmetric (relative defect {defect:.3e})")]
    NotSkew { defect: f64 },

    #[error("matrix is not symmetric (relative defect {defect:.3e})")]
    NotSymmetric { defect: f64 },

    #[error("matrix is not normal (normality defect {defect:.3e} > {tol:.3e})")]
    NotNormal { defect: f64, tol: f64 },

    #[error("matrix is not special orthogonal (sample {index}: orthogonality {orth:.3e}, det {det:.6})")]
    NotSpecialOrthogonal { index: usize, orth: f64, det: f64 },

    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence { routine: &'static str, iterations: usize },

    #[error("eigenvalue cluster inconsistent with sigma = {sigma:.6e}: {detail}")]
    ClusterMismatch { sigma: f64, detail: String },

    #[error("Schur vectors do not block-diagonalize the matrix (off-diagonal mass {mass:.3e} > {tol:.3e})")]
    OffDiagonalMass { mass: f64, tol: f64 },

    #[error("principal logarithm undefined: unpaired negative real eigenvalue {value:.6e}")]
    UnpairedNegativeEigenvalue { value: f64 },

    #[error("logarithm undefined: matrix is singular (eigenvalue modulus {modulus:.3e})")]
    Singular { modulus: f64 },

    #[error("logarithm failed for sample {index}: {source}")]
    SampleLog {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("Lanczos breakdown at step {step} of {m}")]
    LanczosBreakdown { step: usize, m: usize },

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
