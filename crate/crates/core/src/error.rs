use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not real skew-symmetric (residual {residual:e})")]
    NotRealSkew { residual: f64 },
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("particle-hole constraint violated (residual {residual:e})")]
    ParticleHole { residual: f64 },
    #[error("requested rank {requested} exceeds numerical rank {rank}")]
    RankTooLow { requested: usize, rank: usize },
    #[error("zero matrix has no range")]
    ZeroMatrix,
    #[error("coupling graph is disconnected")]
    DisconnectedGraph,
    #[error("singular values {index} and {next} coincide within tolerance; the subspace is ambiguous")]
    AmbiguousSubspace { index: usize, next: usize },
    #[error("replay residual {residual:e} exceeds tolerance")]
    ReplayResidual { residual: f64 },
    #[error("non-real residue {imag:e} in a quantity that must be real")]
    NonRealResidue { imag: f64 },
    #[error("negative probability {value:e}")]
    NegativeProbability { value: f64 },
    #[error("{n} modes exceeds the ceiling of {max}")]
    TooManyModes { n: usize, max: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
