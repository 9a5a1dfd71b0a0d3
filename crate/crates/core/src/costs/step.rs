use crate::error::{Error, Result};

/// `eta(0) = 0`, `eta(t) = 1 / (rho t)` for `t >= 1`.
pub fn step_size(t: usize, rho: f64) -> Result<f64> {
    StepSchedule::new(rho, 0).map(|s| s.eta(t))
}

/// `eta(0) = 0`, `eta(t) = 1 / (rho (t + offset))` for `t >= 1`.
///
/// With `offset = 0` this is the plain `1/(rho t)` schedule. A positive
/// offset only shrinks every step, so the harmonic bound
/// `sum_{s<=t} eta(s) <= (1 + ln t) / rho` still holds; it keeps
/// `eta(1) * max curvature <= 1` when curvatures differ widely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    pub rho: f64,
    pub offset: usize,
}

impl StepSchedule {
    pub fn new(rho: f64, offset: usize) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("rho {rho} must be positive")));
        }
        Ok(StepSchedule { rho, offset })
    }

    /// Smallest offset with `eta(1) * max_curvature <= 1`.
    pub fn auto_offset(rho: f64, max_curvature: f64) -> usize {
        ((max_curvature / rho).ceil() as usize).saturating_sub(1)
    }

    pub fn eta(&self, t: usize) -> f64 {
        if t == 0 {
            0.0
        } else {
            1.0 / (self.rho * (t + self.offset) as f64)
        }
    }
}
