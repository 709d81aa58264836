use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("observable is not Hermitian (deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("Kraus set is not complete (deviation {deviation:.3e})")]
    IncompleteKraus { deviation: f64 },

    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("target qubits must be distinct: {0:?}")]
    DuplicateTarget(Vec<usize>),

    #[error("{what} = {value} is outside [0, 1]")]
    InvalidProbability { what: &'static str, value: f64 },

    #[error("register of {n} qubits exceeds the limit of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid QAOA parameters: {0}")]
    InvalidParams(String),

    #[error("invalid device model: {0}")]
    InvalidDevice(String),

    #[error("invalid optimizer input: {0}")]
    InvalidOptimizer(String),

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
