use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScrapError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("requested level {level} at {energy:.6} rad/ns lies above the barrier top ({barrier:.6} rad/ns)")]
    LevelAboveBarrier { level: usize, energy: f64, barrier: f64 },

    #[error("spectrum holds {available} levels, {required} required")]
    TooFewLevels { required: usize, available: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("step size underflow at t = {time} ns (step {step:e} ns)")]
    StepUnderflow { time: f64, step: f64 },

    #[error("degenerate point Δ = Ω = 0 at t = {time} ns")]
    DegeneratePoint { time: f64 },

    #[error("gate is not a population inverter (best fidelity to σx: {fidelity:.4})")]
    NotAnInverter { fidelity: f64 },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ScrapError {
    pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Self {
        ScrapError::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical pipeline rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            ScrapError::StepUnderflow { .. }
                | ScrapError::DegeneratePoint { .. }
                | ScrapError::LevelAboveBarrier { .. }
                | ScrapError::NotAnInverter { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, ScrapError>;
