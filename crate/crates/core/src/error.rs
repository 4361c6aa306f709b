use thiserror::Error;

/// Errors raised by the linear algebra, quantum, thermodynamic, observer and
/// audit layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid statistical matrix: {0}")]
    InvalidState(String),
    #[error("invalid ket: {0}")]
    InvalidKet(String),
    #[error("invalid POVM: {0}")]
    Povm(String),
    #[error("mixture weights: {0}")]
    Weight(String),
    #[error("embedding: {0}")]
    Embedding(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown name `{0}`")]
    Name(String),
    #[error("chambers `{a}` and `{b}` cannot be told apart by the membranes: {detail}")]
    Indistinguishable { a: String, b: String, detail: String },
    #[error("mapping is not unitary: {0}")]
    Unitary(String),
    #[error("chamber `{0}` is empty")]
    EmptyChamber(String),
    #[error("observer basis: {0}")]
    Basis(String),
    #[error("observer sectors: {0}")]
    Sector(String),
    #[error("lab states have different shapes: {0}")]
    Shape(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
