use super::WeightEstimate;
use crate::error::{Error, Result};
use crate::protocol::RoundRecord;

/// The q-weighted consensus surrogate `y(t) = <q(t), x(t)>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusTrace {
    /// Direct inner products, one per round `first..=last`.
    pub y_direct: Vec<f64>,
    /// `y(t+1) = y(t) - eta(t) <q(t+1), g(t)>`, seeded with `y_direct[0]`.
    pub y_recursive: Vec<f64>,
    /// `max_i |x_i(t) - y(t)|` against the direct form.
    pub deviation: Vec<f64>,
}

impl ConsensusTrace {
    pub fn max_discrepancy(&self) -> f64 {
        self.y_direct
            .iter()
            .zip(&self.y_recursive)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds `y(t)` both ways over the rounds covered by `records` and
/// `estimates`, which must share the same starting round and length.
pub fn consensus_trace(records: &[RoundRecord], estimates: &[WeightEstimate]) -> Result<ConsensusTrace> {
    if records.len() != estimates.len()
        || records
            .iter()
            .zip(estimates)
            .any(|(r, e)| r.round != e.anchor)
    {
        return Err(Error::InvalidArgument("records and weight estimates are not aligned".into()));
    }
    let mut y_direct = Vec::with_capacity(records.len());
    let mut deviation = Vec::with_capacity(records.len());
    for (record, est) in records.iter().zip(estimates) {
        let x = record.states();
        let y = dot(&est.q, &x);
        y_direct.push(y);
        deviation.push(x.iter().map(|v| (v - y).abs()).fold(0.0, f64::max));
    }
    let mut y_recursive = Vec::with_capacity(records.len());
    if let Some(&y0) = y_direct.first() {
        y_recursive.push(y0);
        for t in 1..records.len() {
            let prev = &records[t - 1];
            let step = prev.eta * dot(&estimates[t].q, &prev.gradients);
            y_recursive.push(y_recursive[t - 1] - step);
        }
    }
    Ok(ConsensusTrace {
        y_direct,
        y_recursive,
        deviation,
    })
}

/// The deviation bound
/// `C theta^(k-1) S + R C L sum_{r=0}^{k-2} eta(r) theta^(k-r-2) + 2 eta(k-1) L`
/// where `S` is the sum of initial state magnitudes.
pub fn zeta_bound(
    k: usize,
    c: f64,
    theta: f64,
    lipschitz: f64,
    regular: usize,
    eta: impl Fn(usize) -> f64,
    initial_norm_sum: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta {theta} outside [0, 1)")));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("zeta is defined for k >= 1".into()));
    }
    let head = c * theta.powi(k as i32 - 1) * initial_norm_sum;
    let tail: f64 = (0..k.saturating_sub(1))
        .map(|r| eta(r) * theta.powi((k - r - 2) as i32))
        .sum();
    Ok(head + regular as f64 * c * lipschitz * tail + 2.0 * eta(k - 1) * lipschitz)
}

/// `(C1, C2)` with `sum_{t<=T} zeta(t) <= C1 + C2 (1 + ln T)` for `eta(t) = 1/(rho t)`.
pub fn log_sum_constants(
    c: f64,
    theta: f64,
    lipschitz: f64,
    rho: f64,
    regular: usize,
    initial_norm_sum: f64,
) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&theta) || rho <= 0.0 {
        return Err(Error::InvalidArgument(format!("need theta in [0,1) and rho > 0, got {theta}, {rho}")));
    }
    let c1 = c * initial_norm_sum / (1.0 - theta);
    let c2 = 2.0 * lipschitz / rho + regular as f64 * c * lipschitz / (rho * (1.0 - theta));
    Ok((c1, c2))
}

/// Fits `spread(t) ~ C theta^t` by least squares on `ln spread`.
///
/// Points at or below `1e-13` are treated as converged and skipped. An
/// all-converged series yields `(0, 0)`.
pub fn estimate_theta(spreads: &[f64]) -> Result<(f64, f64)> {
    if spreads.len() < 10 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10 rounds to fit a decay rate, got {}",
            spreads.len()
        )));
    }
    let points: Vec<(f64, f64)> = spreads
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 1e-13)
        .map(|(t, &s)| (t as f64, s.ln()))
        .collect();
    match points.len() {
        0 => return Ok((0.0, 0.0)),
        1 => return Ok((points[0].1.exp(), 0.0)),
        _ => {}
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_l = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_l)).sum();
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::FitFailed(format!("row spread does not decay (log slope {slope})")));
    }
    let intercept = mean_l - slope * mean_t;
    Ok((intercept.exp(), slope.exp()))
}
