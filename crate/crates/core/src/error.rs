use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration field violates its type invariant.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// The configuration yields a non-finite or non-positive spectral efficiency.
    #[error("configuration infeasible: {0}")]
    Infeasible(String),

    /// The energy consumption rate cannot support the small cell.
    #[error("energy consumption rate {mu_e_per_s} /s is outside the feasible range [{min}, {max}]")]
    RateOutOfRange { mu_e_per_s: f64, min: f64, max: f64 },

    /// The macro cell cannot meet the QoS target even with the small cell off.
    #[error("macro bandwidth requirement {required_hz:.1} Hz exceeds the available {available_hz:.1} Hz")]
    MacroInfeasible { required_hz: f64, available_hz: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub(crate) fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { field, reason: format!("must be finite and > 0, got {value}") })
    }
}

pub(crate) fn check_non_negative(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { field, reason: format!("must be finite and >= 0, got {value}") })
    }
}
