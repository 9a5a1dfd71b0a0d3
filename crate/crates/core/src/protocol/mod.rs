//! One synchronous round of trimmed-mean gradient descent.
//!
//! Each regular agent sorts the values its neighbors sent, drops the `F`
//! largest and `F` smallest, averages what is left together with its own
//! state and subtracts a scaled gradient.

mod adversary;
mod round;

pub use adversary::{adversary_transmissions, AdversaryStrategy};
pub use round::{replay_round, run_round, safety_violations, RoundContext, RoundRecord};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A value sent along one directed edge in one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission {
    pub sender: usize,
    pub receiver: usize,
    pub value: f64,
}

/// Which values the filter discards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterVariant {
    /// Always drop exactly the `F` largest and `F` smallest neighbor values.
    #[default]
    Literal,
    /// Drop up to `F` values strictly above and up to `F` strictly below the
    /// agent's own value (W-MSR).
    Relative,
}

impl FromStr for FilterVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "literal" => Ok(FilterVariant::Literal),
            "relative" => Ok(FilterVariant::Relative),
            other => Err(Error::Config(format!("unknown filter variant {other:?}"))),
        }
    }
}

impl fmt::Display for FilterVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterVariant::Literal => "literal",
            FilterVariant::Relative => "relative",
        })
    }
}

/// Result of filtering one agent's inbox. Every entry is `(sender, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub agent: usize,
    pub own_value: f64,
    /// Surviving values, ascending by `(value, sender)`, including the agent itself.
    pub kept: Vec<(usize, f64)>,
    pub removed_top: Vec<(usize, f64)>,
    pub removed_bottom: Vec<(usize, f64)>,
}

impl FilterOutcome {
    /// Number of neighbors the agent heard from.
    pub fn neighbor_count(&self) -> usize {
        self.kept.len() - 1 + self.removed_top.len() + self.removed_bottom.len()
    }

    /// The averaging divisor, equal to `|kept|`.
    pub fn divisor(&self) -> usize {
        self.kept.len()
    }

    /// Mean of the kept values: the update before the gradient step.
    pub fn filtered_mean(&self) -> f64 {
        self.kept.iter().map(|&(_, v)| v).sum::<f64>() / self.divisor() as f64
    }

    /// Every received transmission, kept or removed (the agent's own value excluded).
    pub fn received(&self) -> impl Iterator<Item = Transmission> + '_ {
        self.removed_bottom
            .iter()
            .chain(self.kept.iter().filter(|&&(s, _)| s != self.agent))
            .chain(&self.removed_top)
            .map(move |&(sender, value)| Transmission {
                sender,
                receiver: self.agent,
                value,
            })
    }
}

fn by_value_then_sender(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
}

/// Sorts an inbox by `(value, sender)` and removes the extremes.
pub fn trim_filter(
    agent: usize,
    own_value: f64,
    inbox: &[Transmission],
    f: usize,
    variant: FilterVariant,
) -> Result<FilterOutcome> {
    let required = 2 * f + 1;
    if inbox.len() < required {
        return Err(Error::ProtocolViolation {
            agent,
            neighbors: inbox.len(),
            required,
        });
    }
    let mut sorted: Vec<(usize, f64)> = inbox.iter().map(|t| (t.sender, t.value)).collect();
    sorted.sort_by(by_value_then_sender);

    let (bottom, top) = match variant {
        FilterVariant::Literal => (f, f),
        FilterVariant::Relative => {
            let below = sorted.iter().filter(|&&(_, v)| v < own_value).count();
            let above = sorted.iter().filter(|&&(_, v)| v > own_value).count();
            (below.min(f), above.min(f))
        }
    };
    let len = sorted.len();
    let removed_top = sorted.split_off(len - top);
    let mut kept = sorted.split_off(bottom);
    let removed_bottom = sorted;

    let at = kept
        .binary_search_by(|probe| by_value_then_sender(probe, &(agent, own_value)))
        .unwrap_or_else(|pos| pos);
    kept.insert(at, (agent, own_value));

    Ok(FilterOutcome {
        agent,
        own_value,
        kept,
        removed_top,
        removed_bottom,
    })
}

/// Filtered mean minus `eta * gradient`.
pub fn regular_update(outcome: &FilterOutcome, gradient: f64, eta: f64) -> Result<f64> {
    if !gradient.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite gradient {gradient} at agent {}",
            outcome.agent
        )));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size {eta} must be finite and non-negative")));
    }
    Ok(outcome.filtered_mean() - eta * gradient)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inbox(agent: usize, values: &[(usize, f64)]) -> Vec<Transmission> {
        values
            .iter()
            .map(|&(sender, value)| Transmission {
                sender,
                receiver: agent,
                value,
            })
            .collect()
    }

    fn ids(set: &[(usize, f64)]) -> Vec<usize> {
        set.iter().map(|&(s, _)| s).collect()
    }

    #[test]
    fn drops_one_from_each_end() {
        // a..e = 1..5, agent 0
        let msgs = inbox(0, &[(1, 1.0), (2, 2.0), (3, 3.0), (4, 5.0), (5, 9.0)]);
        let out = trim_filter(0, 4.0, &msgs, 1, FilterVariant::Literal).unwrap();
        assert_eq!(ids(&out.removed_top), vec![5]);
        assert_eq!(ids(&out.removed_bottom), vec![1]);
        let mut kept = ids(&out.kept);
        kept.sort_unstable();
        assert_eq!(kept, vec![0, 2, 3, 4]);
        assert_eq!(out.divisor(), 5 - 2 + 1);
        assert_eq!(out.neighbor_count(), 5);
    }

    #[test]
    fn zero_budget_keeps_everything() {
        let msgs = inbox(0, &[(1, 1.0), (2, -7.0)]);
        let out = trim_filter(0, 4.0, &msgs, 0, FilterVariant::Literal).unwrap();
        assert!(out.removed_top.is_empty() && out.removed_bottom.is_empty());
        assert_eq!(out.kept.len(), 3);
    }

    #[test]
    fn ties_break_by_sender_id() {
        let msgs = inbox(0, &[(3, 2.0), (1, 2.0), (2, 2.0)]);
        let out = trim_filter(0, 4.0, &msgs, 1, FilterVariant::Literal).unwrap();
        assert_eq!(ids(&out.removed_bottom), vec![1]);
        assert_eq!(ids(&out.removed_top), vec![3]);
    }

    #[test]
    fn too_few_neighbors_is_a_violation() {
        let msgs = inbox(0, &[(1, 1.0), (2, 2.0)]);
        assert!(matches!(
            trim_filter(0, 0.0, &msgs, 1, FilterVariant::Literal),
            Err(Error::ProtocolViolation { agent: 0, neighbors: 2, required: 3 })
        ));
    }

    #[test]
    fn relative_variant_only_trims_beyond_own_value() {
        let msgs = inbox(0, &[(1, 1.0), (2, 2.0), (3, 3.0), (4, 5.0), (5, 9.0)]);
        let out = trim_filter(0, 0.5, &msgs, 2, FilterVariant::Relative).unwrap();
        assert!(out.removed_bottom.is_empty());
        assert_eq!(ids(&out.removed_top), vec![4, 5]);
        assert_eq!(out.divisor(), 4);
    }

    #[test]
    fn update_law_examples() {
        let msgs = inbox(0, &[(1, 1.0), (2, 2.0), (3, 3.0), (4, 5.0), (5, 9.0)]);
        let out = trim_filter(0, 4.0, &msgs, 1, FilterVariant::Literal).unwrap();
        assert_eq!(regular_update(&out, 0.0, 0.3).unwrap(), 3.5);
        assert_eq!(regular_update(&out, 0.5, 1.0).unwrap(), 3.0);
        assert!(regular_update(&out, f64::NAN, 1.0).is_err());
        assert!(regular_update(&out, 1.0, -1.0).is_err());

        let flat = inbox(0, &[(1, 2.5), (2, 2.5)]);
        let out = trim_filter(0, 2.5, &flat, 0, FilterVariant::Literal).unwrap();
        assert_eq!(regular_update(&out, 9.0, 0.0).unwrap(), 2.5);
    }

    #[test]
    fn received_lists_every_inbound_value() {
        let msgs = inbox(0, &[(1, 1.0), (2, 2.0), (3, 3.0), (4, 5.0), (5, 9.0)]);
        let out = trim_filter(0, 4.0, &msgs, 1, FilterVariant::Literal).unwrap();
        let mut got: Vec<usize> = out.received().map(|t| t.sender).collect();
        got.sort_unstable();
        assert_eq!(got, vec![1, 2, 3, 4, 5]);
    }
}
