use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::Transmission;
use crate::error::{Error, Result};
use crate::seed::{self, Purpose};

/// How a Byzantine agent chooses what to send.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversaryStrategy {
    /// The same fixed value to everyone, every round.
    Constant { value: f64 },
    /// One uniform draw per round, broadcast to all neighbors.
    Uniform { lo: f64, hi: f64 },
    /// An independent uniform draw for every receiver.
    Conflicting { lo: f64, hi: f64 },
    /// The receiver's own state pushed up or down by `offset`, alternating
    /// direction across receivers.
    TrackingOffset { offset: f64 },
}

impl AdversaryStrategy {
    fn validate(self) -> Result<Self> {
        match self {
            AdversaryStrategy::Uniform { lo, hi } | AdversaryStrategy::Conflicting { lo, hi }
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) =>
            {
                Err(Error::Config(format!("bad adversary interval [{lo}, {hi}]")))
            }
            AdversaryStrategy::Constant { value: v } | AdversaryStrategy::TrackingOffset { offset: v }
                if !v.is_finite() =>
            {
                Err(Error::Config("adversary parameter must be finite".into()))
            }
            ok => Ok(ok),
        }
    }

    /// The value `sender` transmits to `receiver` in `round`.
    pub fn value(&self, seed: u64, sender: usize, receiver: usize, round: usize, receiver_state: f64) -> f64 {
        let draw = |lo: f64, hi: f64, key: u64| {
            if lo == hi {
                return lo;
            }
            seed::stream(seed, Purpose::Adversary, sender as u64, round as u64, key).gen_range(lo..=hi)
        };
        match *self {
            AdversaryStrategy::Constant { value } => value,
            AdversaryStrategy::Uniform { lo, hi } => draw(lo, hi, u64::MAX),
            AdversaryStrategy::Conflicting { lo, hi } => draw(lo, hi, receiver as u64),
            AdversaryStrategy::TrackingOffset { offset } => {
                if (sender + receiver).is_multiple_of(2) {
                    receiver_state + offset
                } else {
                    receiver_state - offset
                }
            }
        }
    }
}

impl FromStr for AdversaryStrategy {
    type Err = Error;

    /// `constant:C`, `uniform:LO,HI`, `conflicting:LO,HI` or `tracking:OFFSET`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let nums = params
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad adversary parameter {p:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let strategy = match (name.trim(), nums.as_slice()) {
            ("constant", [c]) => AdversaryStrategy::Constant { value: *c },
            ("uniform", [lo, hi]) => AdversaryStrategy::Uniform { lo: *lo, hi: *hi },
            ("conflicting", [lo, hi]) => AdversaryStrategy::Conflicting { lo: *lo, hi: *hi },
            ("tracking", [o]) => AdversaryStrategy::TrackingOffset { offset: *o },
            _ => return Err(Error::Config(format!("unknown adversary strategy {s:?}"))),
        };
        strategy.validate()
    }
}

impl fmt::Display for AdversaryStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryStrategy::Constant { value } => write!(f, "constant:{value}"),
            AdversaryStrategy::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            AdversaryStrategy::Conflicting { lo, hi } => write!(f, "conflicting:{lo},{hi}"),
            AdversaryStrategy::TrackingOffset { offset } => write!(f, "tracking:{offset}"),
        }
    }
}

/// One transmission from `sender` to each of `neighbors` in `round`.
///
/// `states` supplies receiver states for strategies that track them.
pub fn adversary_transmissions(
    strategy: &AdversaryStrategy,
    seed: u64,
    sender: usize,
    neighbors: &[usize],
    round: usize,
    states: &[f64],
) -> Vec<Transmission> {
    neighbors
        .iter()
        .map(|&receiver| Transmission {
            sender,
            receiver,
            value: strategy.value(seed, sender, receiver, round, states.get(receiver).copied().unwrap_or(0.0)),
        })
        .collect()
}
