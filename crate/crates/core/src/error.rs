use thiserror::Error;

/// Errors raised by state construction, the optical/logical gate set and
/// the preparation pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state has no amplitude above the pruning tolerance")]
    ZeroState,

    #[error("mode count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("mode {mode} out of range for a state with {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("modes must be distinct, got {0:?}")]
    ModesNotDistinct(Vec<usize>),

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("{what} = {value} outside {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("non-finite amplitude for occupation {0:?}")]
    NonFiniteAmplitude(Vec<u32>),

    #[error("target mode {mode} holds {count} photons; logical gates need 0 or 1")]
    NonBinaryTarget { mode: usize, count: u32 },

    #[error("invalid amplitude profile: {0}")]
    InvalidProfile(String),

    #[error("ancilla qubits left entangled: residual weight {0:e} outside |000>")]
    AncillaNotDisentangled(f64),

    #[error("state shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid register layout: {0}")]
    InvalidLayout(String),

    #[error("unknown register {0:?}")]
    UnknownRegister(String),

    #[error("dot {dot} out of range for an array of {dots} dots")]
    DotOutOfRange { dot: usize, dots: usize },

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("Coulomb blockade violated: dot {dot} holds {count} electrons")]
    BlockadeViolated { dot: usize, count: u32 },

    #[error(
        "sampling infeasible: expected {analytic_mean:e} attempts exceeds the limit of {limit:e}"
    )]
    InfeasibleParameters { analytic_mean: f64, limit: f64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
