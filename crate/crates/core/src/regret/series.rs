use super::{check_shapes, solve_z_star, WeightSchedule};
use crate::costs::CostFunction;
use crate::error::{Error, Result};
use crate::par::Exec;

/// `sum_i alpha_i(t) [f_t^i(x) - f_t^i(z)]`.
fn weighted_gap(alpha: &[f64], fs: &[CostFunction], x: impl Fn(usize) -> f64, z: f64) -> f64 {
    alpha
        .iter()
        .zip(fs)
        .enumerate()
        .map(|(i, (a, f))| a * (f.evaluate(x(i)) - f.evaluate(z)))
        .sum()
}

fn prefix_sums(terms: impl Iterator<Item = f64>) -> Vec<f64> {
    terms
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Cumulative regret of agent `j`: entry `T-1` is
/// `sum_{t=1}^T sum_i alpha_i(t) [f_t^i(x_j(t)) - f_t^i(z)]`.
///
/// `states[k]` and `costs[k]` belong to round `k + 1`, like the schedule.
pub fn agent_regret(j: usize, states: &[Vec<f64>], costs: &[Vec<CostFunction>], schedule: &WeightSchedule, z: f64) -> Vec<f64> {
    prefix_sums(
        schedule
            .rows()
            .iter()
            .zip(costs)
            .zip(states)
            .map(|((alpha, fs), x)| weighted_gap(alpha, fs, |_| x[j], z)),
    )
}

/// Every agent's series, computed in parallel over agents.
pub fn all_agent_regrets(
    states: &[Vec<f64>],
    costs: &[Vec<CostFunction>],
    schedule: &WeightSchedule,
    z: f64,
    exec: Exec,
) -> Vec<Vec<f64>> {
    exec.map_range(schedule.agents(), |j| agent_regret(j, states, costs, schedule, z))
}

/// Cumulative network regret, each agent evaluated at its own state.
pub fn network_regret(states: &[Vec<f64>], costs: &[Vec<CostFunction>], schedule: &WeightSchedule, z: f64) -> Vec<f64> {
    prefix_sums(
        schedule
            .rows()
            .iter()
            .zip(costs)
            .zip(states)
            .map(|((alpha, fs), x)| weighted_gap(alpha, fs, |i| x[i], z)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaQuality {
    pub beta: f64,
    /// `min_t #{i : alpha_i(t) >= beta}`.
    pub gamma_count: usize,
}

pub fn alpha_quality(schedule: &WeightSchedule, beta: f64) -> Result<usize> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("beta {beta} must be positive")));
    }
    Ok(schedule
        .rows()
        .iter()
        .map(|a| a.iter().filter(|&&v| v >= beta).count())
        .min()
        .unwrap_or(0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    pub z_star: f64,
    /// `agent_regret[j][k]` is agent `j`'s cumulative regret through round `k + 1`.
    pub agent_regret: Vec<Vec<f64>>,
    pub network_regret: Vec<f64>,
    pub alpha_quality: AlphaQuality,
}

impl RegretReport {
    /// `(min_j, max_j)` agent regret through round `t`.
    pub fn agent_extremes(&self, t: usize) -> (f64, f64) {
        self.agent_regret
            .iter()
            .map(|s| s[t - 1])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    pub fn horizon(&self) -> usize {
        self.network_regret.len()
    }
}

/// Solves for `z*` under `schedule` and evaluates every regret series.
/// `beta` defaults to half the smallest positive weight.
pub fn regret_report(
    states: &[Vec<f64>],
    costs: &[Vec<CostFunction>],
    schedule: &WeightSchedule,
    bound: f64,
    beta: Option<f64>,
    exec: Exec,
) -> Result<RegretReport> {
    check_shapes(costs, schedule)?;
    if states.len() < schedule.horizon() || states.iter().any(|x| x.len() != schedule.agents()) {
        return Err(Error::InvalidArgument("states do not match the schedule".into()));
    }
    let z_star = solve_z_star(costs, schedule, bound)?;
    let beta = match beta {
        Some(b) => b,
        None => {
            0.5 * schedule
                .rows()
                .iter()
                .flatten()
                .copied()
                .filter(|&v| v > 0.0)
                .fold(f64::INFINITY, f64::min)
        }
    };
    let gamma_count = alpha_quality(schedule, beta)?;
    let network_regret = network_regret(states, costs, schedule, z_star);
    let agent_regret = all_agent_regrets(states, costs, schedule, z_star, exec);
    if network_regret.iter().chain(agent_regret.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("regret series is not finite".into()));
    }
    Ok(RegretReport {
        z_star,
        agent_regret,
        network_regret,
        alpha_quality: AlphaQuality { beta, gamma_count },
    })
}
