use std::f64::consts::TAU;

use rand::Rng;

use super::{CostFunction, CostShape};
use crate::error::{Error, Result};
use crate::seed::{self, Purpose};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    Quadratic,
    /// Quadratic plus `mu |w - m|`.
    Piecewise { mu: f64 },
}

/// Parameters of a synthetic stream with moving minimizers in `B(0, K2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub domain_bound: f64,
    pub minimizer_bound: f64,
    pub lipschitz: f64,
    pub rho: f64,
    pub seed: u64,
    pub kind: SyntheticKind,
}

impl StreamConfig {
    /// Fills in `L = rho (K1 + K2) + mu`, the largest gradient magnitude on `B(0, K1)`.
    pub fn new(domain_bound: f64, minimizer_bound: f64, rho: f64, seed: u64, kind: SyntheticKind) -> Result<Self> {
        let mu = match kind {
            SyntheticKind::Quadratic => 0.0,
            SyntheticKind::Piecewise { mu } => mu,
        };
        let config = StreamConfig {
            domain_bound,
            minimizer_bound,
            lipschitz: rho * (domain_bound + minimizer_bound) + mu,
            rho,
            seed,
            kind,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::Config(format!("rho {} must be positive", self.rho)));
        }
        if !(0.0 <= self.minimizer_bound && self.minimizer_bound <= self.domain_bound) {
            return Err(Error::Config(format!(
                "need 0 <= K2 <= K1, got K2 = {}, K1 = {}",
                self.minimizer_bound, self.domain_bound
            )));
        }
        if self.lipschitz < self.rho * (self.domain_bound + self.minimizer_bound) {
            return Err(Error::Config("L below rho (K1 + K2)".into()));
        }
        if let SyntheticKind::Piecewise { mu } = self.kind {
            if !(mu >= 0.0 && mu.is_finite()) {
                return Err(Error::Config(format!("kink weight {mu} must be non-negative")));
            }
        }
        Ok(())
    }
}

/// `m_i(t) = K2 sin(t / 10 + phase_i)` with a seeded phase per agent.
pub fn minimizer_path(config: &StreamConfig, agent: usize, round: usize) -> f64 {
    let phase = if agent == 0 {
        0.0
    } else {
        seed::stream(config.seed, Purpose::Synthetic, agent as u64, 0, 0).gen_range(0.0..TAU)
    };
    config.minimizer_bound * (round as f64 / 10.0 + phase).sin()
}

pub fn synthetic_stream(config: &StreamConfig, agent: usize, round: usize) -> CostFunction {
    let center = minimizer_path(config, agent, round);
    let shape = match config.kind {
        SyntheticKind::Quadratic => CostShape::Quadratic { curvature: config.rho, center },
        SyntheticKind::Piecewise { mu } => CostShape::Piecewise { curvature: config.rho, center, kink: mu },
    };
    CostFunction { owner: agent, round, shape }
}
