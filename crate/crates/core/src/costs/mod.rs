//! Online cost streams: scalar, strongly convex, with gradients bounded on
//! a ball `B(0, K1)`.

mod sensor;
mod step;
mod synthetic;

pub use sensor::{sensor_cost, stream_constants, SensorModel};
pub use step::{step_size, StepSchedule};
pub use synthetic::{minimizer_path, synthetic_stream, StreamConfig, SyntheticKind};

use crate::error::Result;

/// Parametric form of one revealed cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostShape {
    /// `0.5 * (z - h w)^2`.
    Sensor { gain: f64, measurement: f64 },
    /// `0.5 * a (w - m)^2`.
    Quadratic { curvature: f64, center: f64 },
    /// `0.5 * a (w - m)^2 + mu |w - m|`.
    Piecewise { curvature: f64, center: f64, kink: f64 },
}

/// `f_t^i`, the cost revealed to agent `owner` at the end of `round`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostFunction {
    pub owner: usize,
    pub round: usize,
    pub shape: CostShape,
}

impl CostFunction {
    pub fn evaluate(&self, w: f64) -> f64 {
        match self.shape {
            CostShape::Sensor { gain, measurement } => 0.5 * (measurement - gain * w).powi(2),
            CostShape::Quadratic { curvature, center } => 0.5 * curvature * (w - center).powi(2),
            CostShape::Piecewise { curvature, center, kink } => {
                0.5 * curvature * (w - center).powi(2) + kink * (w - center).abs()
            }
        }
    }

    /// A (sub)gradient; zero is returned at the kink of the piecewise form.
    pub fn gradient(&self, w: f64) -> f64 {
        match self.shape {
            CostShape::Sensor { gain, measurement } => -gain * (measurement - gain * w),
            CostShape::Quadratic { curvature, center } => curvature * (w - center),
            CostShape::Piecewise { curvature, center, kink } => {
                let d = w - center;
                curvature * d + kink * if d > 0.0 { 1.0 } else if d < 0.0 { -1.0 } else { 0.0 }
            }
        }
    }

    /// Strong convexity modulus of this function.
    pub fn rho_local(&self) -> f64 {
        match self.shape {
            CostShape::Sensor { gain, .. } => gain * gain,
            CostShape::Quadratic { curvature, .. } | CostShape::Piecewise { curvature, .. } => curvature,
        }
    }

    pub fn minimizer(&self) -> f64 {
        match self.shape {
            CostShape::Sensor { gain, measurement } => measurement / gain,
            CostShape::Quadratic { center, .. } | CostShape::Piecewise { center, .. } => center,
        }
    }

    /// `(a, b)` with `f(w) = a w^2 / 2 - b w + const`, for smooth quadratics.
    pub fn quadratic_coefficients(&self) -> Option<(f64, f64)> {
        match self.shape {
            CostShape::Sensor { gain, measurement } => Some((gain * gain, gain * measurement)),
            CostShape::Quadratic { curvature, center } => Some((curvature, curvature * center)),
            CostShape::Piecewise { .. } => None,
        }
    }
}

/// Either cost family, addressed by `(agent, round)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CostStream {
    Sensor(SensorModel),
    Synthetic(StreamConfig),
}

impl CostStream {
    pub fn cost(&self, agent: usize, round: usize) -> CostFunction {
        match self {
            CostStream::Sensor(model) => sensor_cost(model, agent, round),
            CostStream::Synthetic(config) => synthetic_stream(config, agent, round),
        }
    }

    /// `(L, rho)` over the regular agents.
    pub fn constants(&self, regular: &[usize], k1: f64) -> Result<(f64, f64)> {
        match self {
            CostStream::Sensor(model) => stream_constants(model, regular, k1),
            CostStream::Synthetic(config) => Ok((config.lipschitz, config.rho)),
        }
    }

    /// Largest per-function curvature over the regular agents.
    pub fn max_curvature(&self, regular: &[usize]) -> f64 {
        match self {
            CostStream::Sensor(model) => regular
                .iter()
                .map(|&i| model.gains[i] * model.gains[i])
                .fold(0.0, f64::max),
            CostStream::Synthetic(config) => config.rho,
        }
    }
}

#[cfg(test)]
pub(crate) mod checks {
    use super::CostFunction;

    /// Central-difference agreement, relative to `max(1, |g|)`.
    pub fn gradient_matches(f: &CostFunction, w: f64, tol: f64) -> bool {
        let h = 1e-6 * w.abs().max(1.0);
        let fd = (f.evaluate(w + h) - f.evaluate(w - h)) / (2.0 * h);
        let g = f.gradient(w);
        (fd - g).abs() <= tol * g.abs().max(1.0)
    }

    pub fn strongly_convex(f: &CostFunction, x: f64, y: f64, rho: f64) -> bool {
        let lhs = f.evaluate(y);
        let rhs = f.evaluate(x) + f.gradient(x) * (y - x) + 0.5 * rho * (y - x).powi(2);
        lhs >= rhs - 1e-9 * lhs.abs().max(1.0)
    }
}
