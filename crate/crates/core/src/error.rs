use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix side {0} is not a power of two (or matrix is not square)")]
    InvalidDimension(usize),

    #[error("matrix is not Hermitian: max |H_ij - conj(H_ji)| = {0:e}")]
    NonHermitian(f64),

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("gate references parameter {index} but only {len} parameters were supplied")]
    ParamIndex { index: usize, len: usize },

    #[error("qubit {index} is out of range for a {num_qubits}-qubit register")]
    QubitIndex { index: usize, num_qubits: usize },

    #[error("control and target coincide on qubit {0}")]
    ControlIsTarget(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("<psi|B|psi> = {value:e} is below the floor {floor:e}; the state fell into the null space of B")]
    SingularBCollapse { value: f64, floor: f64 },

    #[error("Gamma + eps*I is numerically singular (condition estimate {condition:e})")]
    IllConditionedGamma { condition: f64 },

    #[error("F became non-finite at tau = {tau}")]
    Divergence { tau: f64 },

    #[error("<g|B|g> = {0:e} is not positive enough to B-normalize")]
    NotBNormalizable(f64),

    #[error("det(A - lambda B) vanishes identically; the pencil is degenerate")]
    DegeneratePencil,

    #[error("closed form is undefined because Q = 0")]
    UndefinedClosedForm,

    #[error("zero vector")]
    ZeroVector,

    #[error("invalid quantum numbers (n={n}, l={l}, m={m})")]
    InvalidQuantumNumbers { n: u32, l: u32, m: i32 },

    #[error("basis of {0} states would pad beyond 1024 dimensions")]
    SizeOverflow(usize),

    #[error("the 2x2 fit system is singular (determinant {0:e})")]
    SingularFit(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerical method itself (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularBCollapse { .. }
                | Error::IllConditionedGamma { .. }
                | Error::Divergence { .. }
                | Error::NotBNormalizable(_)
                | Error::DegeneratePencil
                | Error::UndefinedClosedForm
                | Error::SingularFit(_)
                | Error::ZeroVector
        )
    }
}
