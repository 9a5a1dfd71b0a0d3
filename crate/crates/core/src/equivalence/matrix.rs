use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{AdversaryPlacement, Graph};
use crate::par::Exec;
use crate::protocol::{FilterOutcome, RoundRecord};

/// `M(t)` restricted to regular agents: `x(t+1) = M(t) x(t) - eta(t) g(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentMatrix {
    pub round: usize,
    pub entries: DMatrix<f64>,
}

fn regular_bracket<'a>(
    placement: &AdversaryPlacement,
    primary: impl Iterator<Item = &'a (usize, f64)>,
    fallback: impl Iterator<Item = &'a (usize, f64)>,
    accept: impl Fn(f64) -> bool,
    closer: impl Fn(f64, f64) -> bool,
) -> Option<(usize, f64)> {
    let pick = |it: &mut dyn Iterator<Item = &'a (usize, f64)>| {
        let mut best: Option<(usize, f64)> = None;
        for &(s, v) in it {
            if placement.is_adversarial(s) || !accept(v) {
                continue;
            }
            best = match best {
                Some((bs, bv)) if !(closer(v, bv) || (v == bv && s < bs)) => Some((bs, bv)),
                _ => Some((s, v)),
            };
        }
        best
    };
    pick(&mut { primary }).or_else(|| pick(&mut { fallback }))
}

/// Row `M_i(t)` for the agent at regular position `k`.
///
/// Regular survivors (and the agent itself) each get `w = 1/|kept|`. A
/// surviving adversarial value `v` is rewritten as `lambda * x_l + (1 -
/// lambda) * x_u`, where `x_u` is the smallest regular value removed from
/// the top that is at least `v` and `x_l` the largest regular value removed
/// from the bottom that is at most `v`; its weight `w` is split accordingly.
/// If a side has no regular removal (possible only under the relative
/// filter) the closest regular survivor on that side is used instead.
pub fn build_equivalent_row(record: &RoundRecord, k: usize, placement: &AdversaryPlacement) -> Result<Vec<f64>> {
    let outcome: &FilterOutcome = &record.outcomes[k];
    let r = placement.regular_count();
    let w = 1.0 / outcome.divisor() as f64;
    let mut row = vec![0.0; r];
    let col = |s: usize| placement.regular_index(s).expect("regular sender has a column");

    for &(sender, v) in &outcome.kept {
        if !placement.is_adversarial(sender) {
            row[col(sender)] += w;
            continue;
        }
        let violated = || Error::AdversaryBudgetViolated {
            agent: outcome.agent,
            round: record.round,
        };
        let upper = regular_bracket(
            placement,
            outcome.removed_top.iter(),
            outcome.kept.iter(),
            |x| x >= v,
            |x, best| x < best,
        )
        .ok_or_else(violated)?;
        let lower = regular_bracket(
            placement,
            outcome.removed_bottom.iter(),
            outcome.kept.iter(),
            |x| x <= v,
            |x, best| x > best,
        )
        .ok_or_else(violated)?;
        let lambda = if upper.1 == lower.1 {
            1.0
        } else {
            (upper.1 - v) / (upper.1 - lower.1)
        };
        row[col(lower.0)] += lambda * w;
        row[col(upper.0)] += (1.0 - lambda) * w;
    }

    let x = record.states();
    let reproduced: f64 = row.iter().zip(&x).map(|(m, x)| m * x).sum();
    let target = outcome.filtered_mean();
    let scale = x.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if (reproduced - target).abs() > 1e-9 * scale {
        return Err(Error::Numeric(format!(
            "row for agent {} reproduces {reproduced}, filter gave {target}",
            outcome.agent
        )));
    }
    Ok(row)
}

pub fn build_matrix(record: &RoundRecord, placement: &AdversaryPlacement) -> Result<EquivalentMatrix> {
    let r = placement.regular_count();
    let mut entries = DMatrix::zeros(r, r);
    for k in 0..r {
        let row = build_equivalent_row(record, k, placement)?;
        for (j, v) in row.into_iter().enumerate() {
            entries[(k, j)] = v;
        }
    }
    Ok(EquivalentMatrix {
        round: record.round,
        entries,
    })
}

/// One matrix per record, built independently across rounds.
pub fn build_all_matrices(
    records: &[RoundRecord],
    placement: &AdversaryPlacement,
    exec: Exec,
) -> Result<Vec<EquivalentMatrix>> {
    exec.try_map_range(records.len(), |t| build_matrix(&records[t], placement))
}

/// `max_i |(M x)_i - eta g_i - x_i(t+1)|` for one round.
pub fn equivalence_residual(matrix: &EquivalentMatrix, record: &RoundRecord) -> f64 {
    let x = nalgebra::DVector::from_vec(record.states());
    let mx = &matrix.entries * x;
    mx.iter()
        .zip(&record.gradients)
        .zip(&record.next)
        .map(|((m, g), next)| (m - record.eta * g - next).abs())
        .fold(0.0, f64::max)
}

/// Structural checks on one matrix.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatrixDiagnostics {
    /// Largest `|row sum - 1|`.
    pub max_row_sum_error: f64,
    pub negative_entries: usize,
    /// Nonzero entries off the graph's edges and the diagonal.
    pub sparsity_violations: usize,
    /// Rows whose diagonal is below `1/|kept|`.
    pub diagonal_violations: usize,
    /// Smallest count, over rows, of off-diagonal entries at least `w/2`.
    pub min_strong_offdiagonal: usize,
}

impl MatrixDiagnostics {
    pub fn is_valid(&self, tolerance: f64) -> bool {
        self.max_row_sum_error <= tolerance
            && self.negative_entries == 0
            && self.sparsity_violations == 0
            && self.diagonal_violations == 0
    }
}

impl EquivalentMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn diagnose(&self, graph: &Graph, placement: &AdversaryPlacement, record: &RoundRecord) -> MatrixDiagnostics {
        let regular = placement.regular();
        let mut d = MatrixDiagnostics {
            min_strong_offdiagonal: usize::MAX,
            ..MatrixDiagnostics::default()
        };
        for (k, outcome) in record.outcomes.iter().enumerate() {
            let w = 1.0 / outcome.divisor() as f64;
            let row = self.entries.row(k);
            d.max_row_sum_error = d.max_row_sum_error.max((row.sum() - 1.0).abs());
            let mut strong = 0;
            for (j, &v) in row.iter().enumerate() {
                if v < 0.0 {
                    d.negative_entries += 1;
                }
                if j == k {
                    if v < w * (1.0 - 1e-12) {
                        d.diagonal_violations += 1;
                    }
                    continue;
                }
                if v != 0.0 && !graph.has_edge(regular[k], regular[j]) {
                    d.sparsity_violations += 1;
                }
                if v >= 0.5 * w * (1.0 - 1e-12) {
                    strong += 1;
                }
            }
            d.min_strong_offdiagonal = d.min_strong_offdiagonal.min(strong);
        }
        if d.min_strong_offdiagonal == usize::MAX {
            d.min_strong_offdiagonal = 0;
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_robust_graph;
    use crate::protocol::{run_round, AdversaryStrategy, FilterVariant, RoundContext};
    use crate::protocol::{trim_filter, Transmission};

    fn isolated(agent: usize, value: f64) -> FilterOutcome {
        FilterOutcome {
            agent,
            own_value: value,
            kept: vec![(agent, value)],
            removed_top: vec![],
            removed_bottom: vec![],
        }
    }

    fn single_agent_record(own: f64, inbox: &[(usize, f64)], f: usize) -> RoundRecord {
        let msgs: Vec<Transmission> = inbox
            .iter()
            .map(|&(sender, value)| Transmission { sender, receiver: 0, value })
            .collect();
        let outcome = trim_filter(0, own, &msgs, f, FilterVariant::Literal).unwrap();
        let next = outcome.filtered_mean();
        RoundRecord {
            round: 0,
            eta: 0.0,
            outcomes: vec![outcome],
            gradients: vec![0.0],
            next: vec![next],
        }
    }

    #[test]
    fn surviving_adversary_is_split_between_brackets() {
        // agent 0 (own 4), regulars a..d = 1..4 with values 1, 2, 3, 5;
        // adversary 5 sends 4.5 and survives between them.
        let placement = AdversaryPlacement::new(6, &[5], 1).unwrap();
        let mut record = single_agent_record(4.0, &[(1, 1.0), (2, 2.0), (3, 3.0), (4, 5.0), (5, 4.5)], 1);
        // Pad the record with trivial rows for the other regular agents so
        // the row can be read back against x(t).
        for (agent, value) in [(1, 1.0), (2, 2.0), (3, 3.0), (4, 5.0)] {
            record.outcomes.push(isolated(agent, value));
            record.gradients.push(0.0);
            record.next.push(value);
        }
        let row = build_equivalent_row(&record, 0, &placement).unwrap();
        let w = 0.25;
        let expected = [w, 0.125 * w, w, w, 0.875 * w];
        for (got, want) in row.iter().zip(expected) {
            assert!((got - want).abs() < 1e-15, "{row:?}");
        }
        let x = [4.0, 1.0, 2.0, 3.0, 5.0];
        let dot: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
        assert!((dot - (2.0 + 3.0 + 4.5 + 4.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn honest_rows_are_uniform_over_kept() {
        let placement = AdversaryPlacement::honest(4, 0);
        let mut record = single_agent_record(1.0, &[(1, 2.0), (2, 3.0), (3, 4.0)], 0);
        for (agent, value) in [(1, 2.0), (2, 3.0), (3, 4.0)] {
            record.outcomes.push(isolated(agent, value));
            record.gradients.push(0.0);
            record.next.push(value);
        }
        let row = build_equivalent_row(&record, 0, &placement).unwrap();
        assert_eq!(row, vec![0.25; 4]);
    }

    #[test]
    fn matrices_reproduce_simulated_rounds() {
        for seed in 0..10 {
            let g = build_robust_graph(24, 5, seed).unwrap();
            let p = crate::graph::place_adversaries(&g, 3, 2, seed, 200).unwrap();
            for variant in [FilterVariant::Literal, FilterVariant::Relative] {
                let ctx = RoundContext {
                    graph: &g,
                    placement: &p,
                    strategy: AdversaryStrategy::Conflicting { lo: -3.0, hi: 3.0 },
                    adversary_seed: seed,
                    cap: 1e6,
                    variant,
                    exec: Exec::default(),
                };
                let mut x: Vec<f64> = (0..24).map(|i| ((i as f64) * 1.3 + seed as f64).sin() * 4.0).collect();
                for t in 0..100 {
                    let grads: Vec<f64> = (0..p.regular_count()).map(|k| ((k + t) as f64).cos()).collect();
                    let (next, record) = run_round(&ctx, t, &x, &grads, 0.05).unwrap();
                    let m = build_matrix(&record, &p).unwrap();
                    assert!(equivalence_residual(&m, &record) < 1e-9);
                    let d = m.diagnose(&g, &p, &record);
                    assert!(d.is_valid(1e-12), "{d:?}");
                    x = next;
                }
            }
        }
    }

    #[test]
    fn broken_locality_is_reported() {
        // two adversaries while F = 1: one survives with no regular value above it
        let placement = AdversaryPlacement::new(6, &[4, 5], 1).unwrap();
        let mut record = single_agent_record(0.0, &[(1, -1.0), (2, 0.5), (4, 9.0), (5, 10.0)], 1);
        for (agent, value) in [(1, -1.0), (2, 0.5), (3, 0.0)] {
            record.outcomes.push(isolated(agent, value));
            record.gradients.push(0.0);
            record.next.push(value);
        }
        assert!(matches!(
            build_equivalent_row(&record, 0, &placement),
            Err(Error::AdversaryBudgetViolated { agent: 0, round: 0 })
        ));
    }
}
