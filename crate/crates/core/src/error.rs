use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fraction {alpha} is not supported here: {reason}")]
    UnsupportedFraction { alpha: f64, reason: &'static str },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no convergence after {iterations} iterations (best estimate {estimate})")]
    Convergence { iterations: usize, estimate: f64 },
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn check_fraction(alpha: f64, lo_open: f64, hi_closed: f64) -> Result<()> {
    if !(alpha > lo_open && alpha <= hi_closed) {
        return invalid(format!("fraction must lie in ({lo_open}, {hi_closed}], got {alpha}"));
    }
    Ok(())
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("radius must be positive and finite, got {r}"));
    }
    Ok(())
}
