//! Hindsight reference point, regret series and the associated bounds.

mod bounds;
mod fit;
mod offline;
mod series;
mod solve;

pub use bounds::{theoretical_bounds, theoretical_bounds_with_offset, BoundConstants};
pub use fit::{fit_log_polynomial, LogFit};
pub use offline::offline_optimum;
pub use series::{agent_regret, all_agent_regrets, alpha_quality, network_regret, regret_report, AlphaQuality, RegretReport};
pub use solve::{objective, solve_z_star, solve_z_star_generic};

use crate::costs::CostFunction;
use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-10;

/// Stochastic weight vectors `alpha(t)` over the regular agents, `t = 1..=T`.
/// `alpha[k]` belongs to round `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSchedule {
    alpha: Vec<Vec<f64>>,
}

impl WeightSchedule {
    pub fn new(alpha: Vec<Vec<f64>>) -> Result<Self> {
        let width = alpha.first().map_or(0, Vec::len);
        for (k, row) in alpha.iter().enumerate() {
            if row.len() != width || width == 0 {
                return Err(Error::InvalidArgument(format!("weight vector {k} has length {}", row.len())));
            }
            if row.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidArgument(format!("weight vector {k} has entries outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::InvalidArgument(format!("weight vector {k} sums to {sum}")));
            }
        }
        Ok(WeightSchedule { alpha })
    }

    /// Uniform `1/R` weights for `horizon` rounds.
    pub fn uniform(agents: usize, horizon: usize) -> Result<Self> {
        if agents == 0 {
            return Err(Error::InvalidArgument("no agents".into()));
        }
        WeightSchedule::new(vec![vec![1.0 / agents as f64; agents]; horizon])
    }

    /// Clamps tiny negative round-off to zero and renormalizes each vector.
    pub fn from_estimates(rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Self> {
        let alpha = rows
            .into_iter()
            .map(|row| {
                let clipped: Vec<f64> = row.into_iter().map(|v| v.max(0.0)).collect();
                let sum: f64 = clipped.iter().sum();
                clipped.into_iter().map(|v| (v / sum).min(1.0)).collect()
            })
            .collect();
        WeightSchedule::new(alpha)
    }

    pub fn horizon(&self) -> usize {
        self.alpha.len()
    }

    pub fn agents(&self) -> usize {
        self.alpha.first().map_or(0, Vec::len)
    }

    /// `alpha(t)` for `1 <= t <= T`.
    pub fn at(&self, t: usize) -> &[f64] {
        &self.alpha[t - 1]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.alpha
    }
}

/// Checks `costs[k]` holds one function per regular agent for each scheduled round.
fn check_shapes(costs: &[Vec<CostFunction>], schedule: &WeightSchedule) -> Result<()> {
    if schedule.horizon() == 0 {
        return Err(Error::InvalidArgument("empty schedule".into()));
    }
    if costs.len() < schedule.horizon() {
        return Err(Error::InvalidArgument(format!(
            "{} cost rounds for a horizon of {}",
            costs.len(),
            schedule.horizon()
        )));
    }
    if let Some(k) = costs[..schedule.horizon()].iter().position(|c| c.len() != schedule.agents()) {
        return Err(Error::InvalidArgument(format!("cost round {} has the wrong width", k + 1)));
    }
    Ok(())
}
