use alloc::string::String;

/// Errors raised while building layouts, gates and descriptors, or while
/// checking the algebraic preconditions of an operation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("subsystem dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("duplicate subsystem label `{0}`")]
    DuplicateSubsystem(String),

    #[error("unknown subsystem `{0}`")]
    UnknownSubsystem(String),

    #[error("layout dimension {dim} exceeds the cap of {cap}")]
    LayoutTooLarge { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subsystem `{0}` is not a qubit")]
    NotQubit(String),

    #[error("subsystem `{0}` appears more than once in a gate or list")]
    RepeatedSubsystem(String),

    #[error("operator is not an involution (residual {residual:e})")]
    NotInvolution { residual: f64 },

    #[error("operator is not hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("operator is not a projector (residual {residual:e})")]
    NotProjector { residual: f64 },

    #[error("operators do not commute (residual {residual:e})")]
    NonCommuting { residual: f64 },

    #[error("expected {expected} descriptor arguments, found {found}")]
    ArgumentCount { expected: usize, found: usize },

    #[error("descriptor argument {index} belongs to the wrong subsystem")]
    SubsystemMismatch { index: usize },

    #[error("time mismatch: descriptors at t={expected}, gate at t={found}")]
    TimeMismatch { expected: usize, found: usize },

    #[error("time step {t} outside network of length {len}")]
    TimeOutOfRange { t: usize, len: usize },

    #[error("gates in time slice {0} act on overlapping subsystems")]
    OverlappingGates(usize),

    #[error("network gate times must be non-decreasing")]
    UnorderedNetwork,

    #[error("gate is not applicable here: {0}")]
    UnsupportedGate(&'static str),

    #[error("operator belongs to a different layout")]
    LayoutMismatch,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
