use super::robust::{is_r_robust_with, max_robustness_with};
use super::{AdversaryPlacement, Graph, DEFAULT_EXHAUSTIVE_LIMIT};
use crate::par::Exec;

/// Outcome of a single assumption clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Too large for an exact check and no certificate was supplied.
    Unverified,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Unverified => "unverified",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub exhaustive_limit: usize,
    /// Robustness level known from construction, used when the graph is too
    /// large for the exhaustive check.
    pub certified_robustness: Option<usize>,
    /// Required lower bound on edge weights; defaults to any positive weight.
    pub kappa: Option<f64>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            certified_robustness: None,
            kappa: None,
        }
    }
}

/// Per-clause diagnostics for the network assumptions.
#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub undirected: Verdict,
    pub required_robustness: usize,
    pub robustness: Verdict,
    /// Exact maximum robustness when the graph is small enough.
    pub max_robustness: Option<usize>,
    pub f_local: Verdict,
    pub max_adversarial_neighbors: usize,
    pub kappa: Option<f64>,
    pub kappa_bounded: Verdict,
    pub min_regular_degree: Option<usize>,
    pub degree: Verdict,
}

impl AssumptionReport {
    /// No clause failed (unverified clauses do not block).
    pub fn passes(&self) -> bool {
        self.clauses().iter().all(|(_, v, _)| *v != Verdict::Fail)
    }

    pub fn fully_verified(&self) -> bool {
        self.clauses().iter().all(|(_, v, _)| *v == Verdict::Pass)
    }

    /// `(clause, verdict, detail)` triples in a fixed order.
    pub fn clauses(&self) -> Vec<(&'static str, Verdict, String)> {
        vec![
            ("undirected", self.undirected, String::new()),
            (
                "robustness",
                self.robustness,
                match self.max_robustness {
                    Some(m) => format!("required {}, max {}", self.required_robustness, m),
                    None => format!("required {}", self.required_robustness),
                },
            ),
            (
                "f_local",
                self.f_local,
                format!("max adversarial neighbors {}", self.max_adversarial_neighbors),
            ),
            (
                "kappa",
                self.kappa_bounded,
                self.kappa.map(|k| format!("min weight {k}")).unwrap_or_default(),
            ),
            (
                "degree",
                self.degree,
                format!(
                    "min regular degree {}, required {}",
                    self.min_regular_degree.map_or("-".into(), |d| d.to_string()),
                    self.required_robustness
                ),
            ),
        ]
    }
}

pub fn check_assumptions(graph: &Graph, placement: &AdversaryPlacement) -> AssumptionReport {
    check_assumptions_with(graph, placement, &CheckOptions::default())
}

pub fn check_assumptions_with(
    graph: &Graph,
    placement: &AdversaryPlacement,
    options: &CheckOptions,
) -> AssumptionReport {
    let f = placement.f();
    let required = 2 * f + 1;
    let n = graph.vertex_count();
    let exec = Exec::default();

    let (robustness, max_r) = if required == 1 {
        (Verdict::from_bool(graph.is_connected()), None)
    } else if n <= options.exhaustive_limit {
        let ok = is_r_robust_with(graph, required, options.exhaustive_limit, exec).unwrap_or(false);
        let max_r = max_robustness_with(graph, options.exhaustive_limit, exec).ok();
        (Verdict::from_bool(ok), max_r)
    } else if options.certified_robustness.is_some_and(|c| c >= required) {
        (Verdict::Pass, None)
    } else {
        (Verdict::Unverified, None)
    };

    let kappa = graph.kappa();
    let kappa_ok = graph.edges().all(|(_, _, w)| {
        w.is_finite() && w > 0.0 && options.kappa.is_none_or(|k| w >= k)
    });
    let min_degree = placement.regular().iter().map(|&i| graph.degree(i)).min();
    let max_adv = placement.max_adversarial_neighbors(graph);

    AssumptionReport {
        undirected: Verdict::from_bool(graph.is_symmetric()),
        required_robustness: required,
        robustness,
        max_robustness: max_r,
        f_local: Verdict::from_bool(max_adv <= f),
        max_adversarial_neighbors: max_adv,
        kappa,
        kappa_bounded: Verdict::from_bool(kappa_ok),
        min_regular_degree: min_degree,
        degree: Verdict::from_bool(min_degree.is_none_or(|d| d >= required)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_robust_graph;

    #[test]
    fn complete_seven_with_one_adversary_passes() {
        let g = Graph::complete(7);
        let p = AdversaryPlacement::new(7, &[6], 1).unwrap();
        let report = check_assumptions(&g, &p);
        assert!(report.fully_verified(), "{:?}", report.clauses());
        assert_eq!(report.max_robustness, Some(4));
    }

    #[test]
    fn cycle_fails_robustness() {
        let g = Graph::cycle(6);
        let p = AdversaryPlacement::honest(6, 1);
        let report = check_assumptions(&g, &p);
        assert_eq!(report.robustness, Verdict::Fail);
        assert_eq!(report.degree, Verdict::Fail);
        assert!(!report.passes());
    }

    #[test]
    fn f_zero_reduces_to_connectivity() {
        let p = AdversaryPlacement::honest(30, 0);
        assert!(check_assumptions(&Graph::cycle(30), &p).fully_verified());
        let split = Graph::from_edges(30, (0..29).filter(|&i| i != 10).map(|i| (i, i + 1))).unwrap();
        assert_eq!(check_assumptions(&split, &p).robustness, Verdict::Fail);
    }

    #[test]
    fn large_graphs_need_a_certificate() {
        let g = build_robust_graph(40, 5, 1).unwrap();
        let p = AdversaryPlacement::new(40, &[39], 2).unwrap();
        let plain = check_assumptions(&g, &p);
        assert_eq!(plain.robustness, Verdict::Unverified);
        assert!(plain.passes() && !plain.fully_verified());
        let certified = check_assumptions_with(
            &g,
            &p,
            &CheckOptions {
                certified_robustness: Some(5),
                ..CheckOptions::default()
            },
        );
        assert_eq!(certified.robustness, Verdict::Pass);
    }
}
