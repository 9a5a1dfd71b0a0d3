use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `value(T) ~ a + b (1 + ln T) + c (1 + ln T)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub r_squared: f64,
}

impl LogFit {
    pub fn predict(&self, horizon: f64) -> f64 {
        let l = 1.0 + horizon.ln();
        self.a + self.b * l + self.c * l * l
    }
}

/// Least-squares fit over `(T, value)` points with `T >= 1`.
pub fn fit_log_polynomial(points: &[(f64, f64)]) -> Result<LogFit> {
    if points.len() < 3 {
        return Err(Error::FitFailed(format!("need 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(t, v)| !(t >= 1.0) || !v.is_finite()) {
        return Err(Error::FitFailed("horizons must be >= 1 and values finite".into()));
    }
    let design = DMatrix::from_fn(points.len(), 3, |r, c| (1.0 + points[r].0.ln()).powi(c as i32));
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let coef = design
        .clone()
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::FitFailed(e.to_string()))?;
    let fitted = &design * &coef;
    let mean = y.mean();
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = y.iter().zip(fitted.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(LogFit {
        a: coef[0],
        b: coef[1],
        c: coef[2],
        r_squared,
    })
}
