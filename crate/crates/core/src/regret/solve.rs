use super::{check_shapes, WeightSchedule};
use crate::costs::CostFunction;
use crate::error::{Error, Result};

/// `F(x) = sum_t sum_j alpha_j(t) f_t^j(x)`.
pub fn objective(costs: &[Vec<CostFunction>], schedule: &WeightSchedule, x: f64) -> f64 {
    schedule
        .rows()
        .iter()
        .zip(costs)
        .map(|(alpha, fs)| alpha.iter().zip(fs).map(|(a, f)| a * f.evaluate(x)).sum::<f64>())
        .sum()
}

fn derivative(costs: &[Vec<CostFunction>], schedule: &WeightSchedule, x: f64) -> f64 {
    schedule
        .rows()
        .iter()
        .zip(costs)
        .map(|(alpha, fs)| alpha.iter().zip(fs).map(|(a, f)| a * f.gradient(x)).sum::<f64>())
        .sum()
}

/// Minimizer of the weighted objective. Closed form when every cost is a
/// smooth quadratic, otherwise [`solve_z_star_generic`] on `[-bound, bound]`.
pub fn solve_z_star(costs: &[Vec<CostFunction>], schedule: &WeightSchedule, bound: f64) -> Result<f64> {
    check_shapes(costs, schedule)?;
    let mut curvature = 0.0;
    let mut linear = 0.0;
    for (alpha, fs) in schedule.rows().iter().zip(costs) {
        for (a, f) in alpha.iter().zip(fs) {
            match f.quadratic_coefficients() {
                Some((p, q)) => {
                    curvature += a * p;
                    linear += a * q;
                }
                None => return solve_z_star_generic(costs, schedule, -bound, bound),
            }
        }
    }
    if curvature <= 0.0 {
        return Err(Error::DegenerateObjective);
    }
    Ok(linear / curvature)
}

/// Golden-section search on `[lo, hi]` followed by bisection on the sign of
/// the (sub)derivative, down to a bracket of `1e-10`.
pub fn solve_z_star_generic(costs: &[Vec<CostFunction>], schedule: &WeightSchedule, lo: f64, hi: f64) -> Result<f64> {
    check_shapes(costs, schedule)?;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
    }
    let costs = &costs[..schedule.horizon()];
    let f = |x| objective(costs, schedule, x);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-6 * (hi - lo) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // Widen by a step so the minimizer stays bracketed, then bisect on F'.
    let step = b - a;
    let (mut a, mut b) = ((a - step).max(lo), (b + step).min(hi));
    let g = |x| derivative(costs, schedule, x);
    if g(a) >= 0.0 {
        return Ok(a);
    }
    if g(b) <= 0.0 {
        return Ok(b);
    }
    while b - a > 1e-10 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}
