use crate::error::{Error, Result};

/// Constants of the network (`a*`) and agent (`b*`) regret bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

fn evaluate(c0: f64, c1: f64, c2: f64, horizon: usize) -> f64 {
    let l = 1.0 + (horizon.max(1) as f64).ln();
    c0 + c1 * l + c2 * l * l
}

impl BoundConstants {
    /// `A1 + A2 (1 + ln T) + A3 (1 + ln T)^2`.
    pub fn network_bound(&self, horizon: usize) -> f64 {
        evaluate(self.a1, self.a2, self.a3, horizon)
    }

    pub fn agent_bound(&self, horizon: usize) -> f64 {
        evaluate(self.b1, self.b2, self.b3, horizon)
    }
}

/// Bound constants for `eta(t) = 1/(rho t)`; `d = |y(0) - z*|`.
pub fn theoretical_bounds(lipschitz: f64, rho: f64, c1: f64, c2: f64, d: f64) -> Result<BoundConstants> {
    theoretical_bounds_with_offset(lipschitz, rho, c1, c2, d, 0)
}

/// As [`theoretical_bounds`] for `eta(t) = 1/(rho (t + offset))`. The offset
/// only inflates the `d^2` coefficient, from `rho/2` to `rho (1 + offset)/2`.
pub fn theoretical_bounds_with_offset(
    lipschitz: f64,
    rho: f64,
    c1: f64,
    c2: f64,
    d: f64,
    offset: usize,
) -> Result<BoundConstants> {
    let valid = |v: f64| v >= 0.0 && v.is_finite();
    if !(lipschitz > 0.0 && rho > 0.0 && valid(lipschitz) && valid(rho) && valid(c1) && valid(c2) && valid(d)) {
        return Err(Error::InvalidArgument(format!(
            "bound constants need L, rho > 0 and C1, C2, d >= 0; got {lipschitz}, {rho}, {c1}, {c2}, {d}"
        )));
    }
    let l = lipschitz;
    let quad = 0.5 * rho * (1.0 + offset as f64) * d * d;
    let a3 = l * l / (2.0 * rho) + l * c2;
    Ok(BoundConstants {
        a1: l * c1 + rho * c1 * d + quad,
        a2: l * (c1 + c2) + l * l / (2.0 * rho) + (l + rho * c2) * d,
        a3,
        b1: 3.0 * l * c1 + rho * c1 * d + quad,
        b2: l * (c1 + 3.0 * c2) + l * l / (2.0 * rho) + (l + rho * c2) * d,
        b3: a3,
    })
}
