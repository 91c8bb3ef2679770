use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty site list")]
    EmptySpace,
    #[error("at most one clock site is allowed, found {0}")]
    MultipleClocks(usize),
    #[error("boson cutoff must be at least 1")]
    BosonCutoff,
    #[error("site index {index} out of range for a space with {len} sites")]
    SiteOutOfRange { index: usize, len: usize },
    #[error("operator {op} is not defined on a {site} site")]
    KindMismatch { op: &'static str, site: &'static str },
    #[error("operands live on different Hilbert spaces")]
    SpaceMismatch,
    #[error("matrix dimension {got} does not match space dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator flagged Hermitian deviates from its adjoint by {0:e}")]
    NotHermitian(f64),
    #[error("total S_z value {value} is not attainable with {qubits} qubits")]
    UnattainableSz { value: i64, qubits: usize },
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("occupation tuple does not fit the space")]
    BadOccupation,
    #[error("space has no clock site")]
    NoClock,
    #[error("clock sector must be 0 or 1, got {0}")]
    BadSector(usize),
    #[error("operator couples clock sectors (max element {0:e})")]
    ClockCoupling(f64),
    #[error("detuning vanishes in clock sector {0}")]
    SingularDetuning(usize),
    #[error("coupling list has length {got}, expected {expected}")]
    CouplingLength { expected: usize, got: usize },
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("no real solution: Delta_a * Delta_b = {0} must be negative")]
    NoRealSolution(f64),
    #[error("fourth-order builder requires uniform couplings")]
    NonUniformCouplings,
    #[error("invalid disorder specification: {0}")]
    InvalidDisorder(String),
    #[error("dimension {dim} exceeds the dense eigensolver cap {cap}")]
    DimensionOverCap { dim: usize, cap: usize },
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("branched state components must share one system space without a clock site")]
    BadBranchSpace,
    #[error("relative error undefined: reference correlator vanishes")]
    ZeroReference,
    #[error("manifold has {got} levels, at least {need} required")]
    ManifoldTooSmall { need: usize, got: usize },
    #[error("manifold ({boson}, {qubit}) has {exact} exact levels but {effective} effective levels")]
    CardinalityMismatch { boson: usize, qubit: usize, exact: usize, effective: usize },
    #[error("expected a three-site periodic ring")]
    NotARing,
    #[error("sample count must be at least 1")]
    NoSamples,
}

pub type Result<T> = std::result::Result<T, Error>;
