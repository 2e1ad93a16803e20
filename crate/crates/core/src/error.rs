use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-norm {off_norm:.3e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },
    #[error("bad factorization: {0}")]
    BadFactorization(String),
    #[error("operator is not positive semidefinite (smallest eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },
    #[error("trace {trace} is not 1")]
    NotNormalized { trace: f64 },
    #[error("basis is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("inconsistent ensemble: {0}")]
    InconsistentEnsemble(String),
    #[error("state is not majorized: {0}")]
    NotMajorized(String),
    #[error("g(H) is undefined for a finite table law")]
    FiniteTableLaw,
    #[error("lambda {lambda} is not above g(H) = {g}")]
    LambdaBelowG { lambda: f64, g: f64 },
    #[error("Gibbs truncation tail {tail:.3e} exceeds {tolerance:.1e} of the partition sum")]
    TruncationTail { tail: f64, tolerance: f64 },
    #[error("support of the state escapes the truncation ({0})")]
    SupportEscapesTruncation(String),
    #[error("q_n = {q} exceeds one at n = {n}")]
    QExceedsOne { q: f64, n: usize },
    #[error("invalid energy level law: {0}")]
    InvalidLevelLaw(String),
    #[error("operation is not trace preserving (deviation {deviation:.3e})")]
    NotAChannel { deviation: f64 },
    #[error("operation is trace increasing (excess {excess:.3e})")]
    TraceIncreasing { excess: f64 },
    #[error("invalid POVM: {0}")]
    InvalidPOVM(String),
    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },
    #[error("incompatible purification: {0}")]
    IncompatiblePurification(String),
    #[error("functional undefined: {0}")]
    FunctionalUndefined(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
