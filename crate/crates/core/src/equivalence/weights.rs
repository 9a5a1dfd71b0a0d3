use nalgebra::DMatrix;

use super::EquivalentMatrix;
use crate::error::{Error, Result};

/// Finite-horizon estimate of the limiting weight vector `q(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightEstimate {
    pub q: Vec<f64>,
    pub anchor: usize,
    pub horizon: usize,
    /// Max over columns of the spread across rows of `Phi(horizon, anchor)`.
    pub row_spread: f64,
}

impl WeightEstimate {
    fn from_product(phi: &DMatrix<f64>, anchor: usize, horizon: usize) -> Self {
        let rows = phi.nrows() as f64;
        let q = phi.column_iter().map(|c| c.sum() / rows).collect();
        WeightEstimate {
            q,
            anchor,
            horizon,
            row_spread: row_spread(phi),
        }
    }

    /// Entries strictly above `tolerance`.
    pub fn positive_count(&self, tolerance: f64) -> usize {
        self.q.iter().filter(|&&v| v > tolerance).count()
    }

    pub fn min_positive(&self, tolerance: f64) -> Option<f64> {
        self.q.iter().copied().filter(|&v| v > tolerance).reduce(f64::min)
    }
}

/// Max over columns of `max_i P_ij - min_i P_ij`.
pub fn row_spread(p: &DMatrix<f64>) -> f64 {
    p.column_iter()
        .map(|c| c.max() - c.min())
        .fold(0.0, f64::max)
}

fn lookup(matrices: &[EquivalentMatrix], round: usize) -> Result<&EquivalentMatrix> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::InvalidArgument("no matrices recorded".into()))?
        .round;
    round
        .checked_sub(first)
        .and_then(|k| matrices.get(k))
        .filter(|m| m.round == round)
        .ok_or_else(|| Error::InvalidArgument(format!("round {round} not recorded")))
}

/// `Phi(t, s) = M(t) M(t-1) ... M(s)`, with `Phi(t, t) = M(t)`.
pub fn phi_product(matrices: &[EquivalentMatrix], s: usize, t: usize) -> Result<DMatrix<f64>> {
    if s > t {
        return Err(Error::InvalidArgument(format!("anchor {s} after horizon {t}")));
    }
    let mut phi = lookup(matrices, s)?.entries.clone();
    for round in s + 1..=t {
        phi = &lookup(matrices, round)?.entries * phi;
    }
    Ok(phi)
}

/// `q(s)` as the column-wise mean of the rows of `Phi(t_end, s)`.
pub fn estimate_q(matrices: &[EquivalentMatrix], s: usize, t_end: usize) -> Result<WeightEstimate> {
    Ok(WeightEstimate::from_product(&phi_product(matrices, s, t_end)?, s, t_end))
}

/// `q(s)` for every anchor `s` in `first..=t_end`, sharing one backward
/// accumulation `Phi(t_end, s) = Phi(t_end, s+1) M(s)`. Index `k` of the
/// result is anchor `first + k`.
pub fn estimate_all_q(matrices: &[EquivalentMatrix], t_end: usize) -> Result<Vec<WeightEstimate>> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::InvalidArgument("no matrices recorded".into()))?
        .round;
    let mut phi = lookup(matrices, t_end)?.entries.clone();
    let mut out = Vec::with_capacity(t_end + 1 - first);
    out.push(WeightEstimate::from_product(&phi, t_end, t_end));
    for s in (first..t_end).rev() {
        phi *= &lookup(matrices, s)?.entries;
        out.push(WeightEstimate::from_product(&phi, s, t_end));
    }
    out.reverse();
    Ok(out)
}

/// Row spread of `Phi(t, first)` for every recorded `t`.
pub fn forward_spreads(matrices: &[EquivalentMatrix]) -> Vec<f64> {
    let mut iter = matrices.iter();
    let Some(first) = iter.next() else {
        return Vec::new();
    };
    let mut phi = first.entries.clone();
    let mut out = vec![row_spread(&phi)];
    for m in iter {
        phi = &m.entries * phi;
        out.push(row_spread(&phi));
    }
    out
}
