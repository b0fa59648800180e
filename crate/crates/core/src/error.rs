use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix has non-finite entries")]
    Nonfinite,
    #[error("negative eigenvalue {0:.3e} below clipping window")]
    NegativeEigenvalue(f64),
    #[error("unsupported Schatten exponent {0}")]
    UnsupportedExponent(f64),
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("bad region: {0}")]
    BadRegion(String),
    #[error("register mismatch")]
    RegisterMismatch,
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
    #[error("invalid partition: {0}")]
    PartitionInvalid(String),
    #[error("regions overlap")]
    RegionsOverlap,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("parameters out of range: {0}")]
    ParamsOutOfRange(String),
    #[error("inconclusive: cmi {cmi:.3e}, recovery error {recovery:.3e}")]
    Inconclusive { cmi: f64, recovery: f64 },
    #[error("region is not a mirror pair")]
    UnpairedBlock,
    #[error("input was not built as a stabilizer state")]
    NotStabilizerInput,
    #[error("state is not diagonal in the computational basis")]
    NotClassical,
    #[error("generators do not commute or are dependent: {0}")]
    NonCommutingGenerators(String),
    #[error("unknown fixture {0}")]
    BadName(String),
    #[error("too few samples for a fit ({0})")]
    TooFewSamples(usize),
    #[error("generator is not detailed balanced (residual {0:.3e})")]
    NotDetailedBalanced(f64),
    #[error("Hamiltonian terms do not commute")]
    NotCommuting,
    #[error("local term is not detailed balanced (residual {0:.3e})")]
    NotLocallyBalanced(f64),
    #[error("circuit pair is not locally reversible (residual {0:.3e})")]
    NotLocallyReversible(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
