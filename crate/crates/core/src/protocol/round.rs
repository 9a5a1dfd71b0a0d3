use super::{regular_update, trim_filter, AdversaryStrategy, FilterOutcome, FilterVariant, Transmission};
use crate::error::{Error, Result};
use crate::graph::{AdversaryPlacement, Graph};
use crate::par::Exec;

/// Everything a round needs besides the states themselves.
#[derive(Debug, Clone)]
pub struct RoundContext<'a> {
    pub graph: &'a Graph,
    pub placement: &'a AdversaryPlacement,
    pub strategy: AdversaryStrategy,
    pub adversary_seed: u64,
    /// Adversarial values are clamped to `[-cap, cap]`.
    pub cap: f64,
    pub variant: FilterVariant,
    pub exec: Exec,
}

/// Snapshot of one round. Vectors are indexed by regular position, matching
/// [`AdversaryPlacement::regular`].
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub eta: f64,
    /// Filter result per regular agent; together these hold every value
    /// received by a regular agent this round.
    pub outcomes: Vec<FilterOutcome>,
    pub gradients: Vec<f64>,
    /// Regular states after the round.
    pub next: Vec<f64>,
}

impl RoundRecord {
    /// Regular states at the start of the round.
    pub fn states(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.own_value).collect()
    }

    /// All transmissions into regular agents.
    pub fn transmissions(&self) -> impl Iterator<Item = Transmission> + '_ {
        self.outcomes.iter().flat_map(FilterOutcome::received)
    }
}

impl RoundContext<'_> {
    fn inbox(&self, receiver: usize, round: usize, states: &[f64]) -> Vec<Transmission> {
        self.graph
            .neighbors(receiver)
            .iter()
            .map(|&sender| {
                let value = if self.placement.is_adversarial(sender) {
                    self.strategy
                        .value(self.adversary_seed, sender, receiver, round, states[receiver])
                        .clamp(-self.cap, self.cap)
                } else {
                    states[sender]
                };
                Transmission {
                    sender,
                    receiver,
                    value,
                }
            })
            .collect()
    }
}

/// Executes one synchronous round.
///
/// `states` holds `x(t)` for every vertex (adversarial entries are ignored
/// and passed through); `gradients` holds `g_i(t)` per regular agent. All
/// transmissions are formed from `x(t)` before any agent updates.
pub fn run_round(
    ctx: &RoundContext<'_>,
    round: usize,
    states: &[f64],
    gradients: &[f64],
    eta: f64,
) -> Result<(Vec<f64>, RoundRecord)> {
    let regular = ctx.placement.regular();
    if states.len() != ctx.graph.vertex_count() || gradients.len() != regular.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} states and {} gradients, got {} and {}",
            ctx.graph.vertex_count(),
            regular.len(),
            states.len(),
            gradients.len()
        )));
    }
    let f = ctx.placement.f();
    let updates = ctx.exec.try_map_range(regular.len(), |k| {
        let i = regular[k];
        let outcome = trim_filter(i, states[i], &ctx.inbox(i, round, states), f, ctx.variant)?;
        let next = regular_update(&outcome, gradients[k], eta)?;
        if !next.is_finite() {
            return Err(Error::Numeric(format!("agent {i} state overflowed in round {round}")));
        }
        Ok((outcome, next))
    })?;

    let (outcomes, next): (Vec<_>, Vec<_>) = updates.into_iter().unzip();
    let mut new_states = states.to_vec();
    for (&i, &x) in regular.iter().zip(&next) {
        new_states[i] = x;
    }
    Ok((
        new_states,
        RoundRecord {
            round,
            eta,
            outcomes,
            gradients: gradients.to_vec(),
            next,
        },
    ))
}

/// Recomputes the post-round regular states from a record alone.
pub fn replay_round(record: &RoundRecord) -> Result<Vec<f64>> {
    record
        .outcomes
        .iter()
        .zip(&record.gradients)
        .map(|(o, &g)| regular_update(o, g, record.eta))
        .collect()
}

/// Regular agents whose filtered mean escapes the interval spanned by the
/// regular values in their closed neighborhood.
pub fn safety_violations(placement: &AdversaryPlacement, record: &RoundRecord) -> Vec<usize> {
    record
        .outcomes
        .iter()
        .filter(|o| {
            let (lo, hi) = o
                .received()
                .filter(|t| !placement.is_adversarial(t.sender))
                .map(|t| t.value)
                .fold((o.own_value, o.own_value), |(lo, hi), v| (lo.min(v), hi.max(v)));
            let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
            let m = o.filtered_mean();
            m < lo - slack || m > hi + slack
        })
        .map(|o| o.agent)
        .collect()
}
