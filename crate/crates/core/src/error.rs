use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema violation at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("invalid field configuration: {0}")]
    InvalidField(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("variance mismatch: {0}")]
    VarianceMismatch(String),

    #[error("not a chain map in degree {degree}")]
    NotChainMap { degree: i64 },

    #[error("ho-morphism is not closed: {0}")]
    NotClosed(String),

    #[error("endomorphism is singular in degree {degree}")]
    SingularEndomorphism { degree: i64 },

    #[error("not chainwise Tate in degree {degree}: {defect} dimension(s) outside the q-power eigenspaces")]
    NotTate { degree: i64, defect: usize },

    #[error("unsupported eigenvalues (only integer powers of q are handled): {0}")]
    UnsupportedWeil(String),

    #[error("grading error: {0}")]
    Grading(String),

    #[error("invalid slope alpha: {0}")]
    InvalidAlpha(String),

    #[error("homology is not pure at degree {degree}, weight {weight}")]
    Impure { degree: i64, weight: i64 },

    #[error("negative degrees are not allowed here (found {0})")]
    NegativeDegree(i64),

    #[error("invalid dg-algebra: {0}")]
    InvalidAlgebra(String),

    #[error("not cohomologically connected: {0}")]
    NotConnected(String),

    #[error("not simply connected: H^1 has dimension {0}")]
    NotSimplyConnected(usize),

    #[error("Massey product not defined: obstruction at ({i},{j})")]
    MasseyUndefined { i: usize, j: usize },

    #[error("model construction failed: {0}")]
    Model(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
