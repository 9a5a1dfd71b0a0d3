use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{CostFunction, CostShape};
use crate::error::{Error, Result};
use crate::seed::{self, Purpose};

/// Linear sensors `z_i(t) = H_i x + v_i(t)` observing one scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorModel {
    pub true_x: f64,
    /// Observation gain per vertex, drawn once.
    pub gains: Vec<f64>,
    pub noise_sigma: f64,
    pub seed: u64,
}

const RHO_FLOOR: f64 = 1e-8;

impl SensorModel {
    /// Draws gains from uniform(0, 2), redrawing any below `h_min`.
    pub fn draw(vertex_count: usize, true_x: f64, noise_sigma: f64, h_min: f64, seed: u64) -> Result<Self> {
        if !(0.0..2.0).contains(&h_min) {
            return Err(Error::Config(format!("h_min {h_min} must lie in [0, 2)")));
        }
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(Error::Config(format!("noise sigma {noise_sigma} must be non-negative")));
        }
        let gains = (0..vertex_count)
            .map(|i| {
                let mut rng = seed::stream(seed, Purpose::Gains, i as u64, 0, 0);
                loop {
                    let h: f64 = rng.gen_range(0.0..2.0);
                    if h >= h_min && h > 0.0 {
                        break h;
                    }
                }
            })
            .collect();
        Ok(SensorModel {
            true_x,
            gains,
            noise_sigma,
            seed,
        })
    }

    /// `z_i(t)`, a pure function of `(seed, i, t)`.
    pub fn measurement(&self, agent: usize, round: usize) -> f64 {
        let noise: f64 = if self.noise_sigma == 0.0 {
            0.0
        } else {
            seed::stream(self.seed, Purpose::Noise, agent as u64, round as u64, 0).sample(StandardNormal)
        };
        self.gains[agent] * self.true_x + self.noise_sigma * noise
    }
}

/// `f_i(t)(w) = 0.5 * (z_i(t) - H_i w)^2`.
pub fn sensor_cost(model: &SensorModel, agent: usize, round: usize) -> CostFunction {
    CostFunction {
        owner: agent,
        round,
        shape: CostShape::Sensor {
            gain: model.gains[agent],
            measurement: model.measurement(agent, round),
        },
    }
}

/// `(L, rho)` for the regular agents on the ball `B(0, k1)`.
///
/// `rho = min H_i^2`. `L = max |H_i| (|H_i| k1 + |z|_q)` where `|z|_q` is the
/// noiseless measurement magnitude inflated by the two-sided 99.9% normal
/// quantile of the noise.
pub fn stream_constants(model: &SensorModel, regular: &[usize], k1: f64) -> Result<(f64, f64)> {
    if regular.is_empty() {
        return Err(Error::Config("no regular agents".into()));
    }
    let quantile = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.9995);
    let mut rho = f64::INFINITY;
    let mut lipschitz: f64 = 0.0;
    for &i in regular {
        let h = model.gains[i].abs();
        rho = rho.min(h * h);
        let z_bound = h * model.true_x.abs() + quantile * model.noise_sigma;
        lipschitz = lipschitz.max(h * (h * k1 + z_bound));
    }
    if rho < RHO_FLOOR {
        return Err(Error::Config(format!("strong convexity {rho} below floor {RHO_FLOOR}")));
    }
    Ok((lipschitz, rho))
}
