use std::ops::Range;

use crate::costs::SensorModel;
use crate::error::{Error, Result};

/// `x* = (1/T) sum_t (sum_i H_i^2)^{-1} (sum_i H_i z_i(t))` over `agents`
/// and the given rounds.
pub fn offline_optimum(model: &SensorModel, agents: &[usize], rounds: Range<usize>) -> Result<f64> {
    let curvature: f64 = agents.iter().map(|&i| model.gains[i] * model.gains[i]).sum();
    if !(curvature > 0.0) {
        return Err(Error::DegenerateObjective);
    }
    if rounds.is_empty() {
        return Err(Error::InvalidArgument("no rounds".into()));
    }
    let count = rounds.len() as f64;
    let total: f64 = rounds
        .map(|t| {
            let weighted: f64 = agents.iter().map(|&i| model.gains[i] * model.measurement(i, t)).sum();
            weighted / curvature
        })
        .sum();
    Ok(total / count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_recovers_truth() {
        let m = SensorModel::draw(40, -3.7, 0.0, 0.1, 11).unwrap();
        let all: Vec<usize> = (0..40).collect();
        let x = offline_optimum(&m, &all, 1..501).unwrap();
        assert!((x + 3.7).abs() < 1e-10);
    }

    #[test]
    fn single_sensor_arithmetic() {
        let m = SensorModel { true_x: 3.0, gains: vec![2.0], noise_sigma: 0.0, seed: 0 };
        assert_eq!(offline_optimum(&m, &[0], 1..8).unwrap(), 3.0);
        assert!(offline_optimum(&m, &[], 1..8).is_err());
        assert!(offline_optimum(&m, &[0], 3..3).is_err());
    }

    #[test]
    fn converges_with_many_rounds() {
        let mean_error: f64 = (0..5)
            .map(|seed| {
                let m = SensorModel::draw(10, 1.0, 1.0, 0.1, seed).unwrap();
                let all: Vec<usize> = (0..10).collect();
                (offline_optimum(&m, &all, 1..10_001).unwrap() - 1.0).abs()
            })
            .sum::<f64>()
            / 5.0;
        assert!(mean_error < 0.05, "{mean_error}");
    }
}
