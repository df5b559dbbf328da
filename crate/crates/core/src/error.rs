use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("service model has non-finite moments")]
    NonFiniteMoment,

    #[error("no sampler available for a moment-only service model")]
    NoSampler,

    #[error("horizon too small: warmup {warmup} must be below horizon {horizon}")]
    HorizonTooSmall { horizon: u64, warmup: u64 },

    #[error("infinite FCFS queue is unstable at load {rho} (needs rho < 1)")]
    Unstable { rho: f64 },

    #[error("load {rho} is within 1e-9 of the removable singularity at rho = 1; perturb rho")]
    SingularLoad { rho: f64 },

    #[error("formula produced {value}, outside [0, 1]")]
    OutOfRange { value: f64 },

    #[error("ordering between uniform and exponential service changes sign more than once up to m0 = {m0_max}")]
    NonMonotoneCrossing { m0_max: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Positive finite rate check shared by every layer.
pub(crate) fn check_rate(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}
