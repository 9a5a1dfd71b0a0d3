use rand::Rng;

use super::config::{CostSpec, FChoice, GraphSource, RunConfig, StepOffset};
use crate::costs::{CostFunction, CostStream, SensorModel, StepSchedule, StreamConfig, SyntheticKind};
use crate::equivalence::{
    build_all_matrices, consensus_trace, equivalence_residual, estimate_all_q, estimate_theta, forward_spreads,
    log_sum_constants, ConsensusTrace, WeightEstimate,
};
use crate::error::{Error, Result};
use crate::graph::{
    build_robust_graph, check_assumptions_with, enumerate_reduced_graphs, min_reduced_size, parse_graph_file,
    place_adversaries, AdversaryPlacement, AssumptionReport, CheckOptions, Graph,
};
use crate::par::Exec;
use crate::protocol::{run_round, safety_violations, RoundContext, RoundRecord};
use crate::regret::{
    fit_log_polynomial, objective, offline_optimum, regret_report, theoretical_bounds_with_offset, BoundConstants,
    LogFit, RegretReport, WeightSchedule,
};
use crate::seed::{self, Purpose};

/// Inflation applied to the fitted contraction constant before bounding.
pub const BOUND_SAFETY_FACTOR: f64 = 10.0;

/// Anchors this close to the end of the simulation are not expected to have
/// converged weight estimates.
pub const SPREAD_WINDOW: usize = 200;

/// Per-round checks on the equivalent matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixSummary {
    pub round: usize,
    pub residual: f64,
    pub max_row_sum_error: f64,
    pub negative_entries: usize,
    pub sparsity_violations: usize,
    pub diagonal_violations: usize,
    pub min_strong_offdiagonal: usize,
}

/// Everything derived after the simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub max_equivalence_residual: f64,
    pub max_row_sum_error: f64,
    pub matrix_violations: usize,
    pub safety_violations: usize,
    /// `max |sum q(s) - 1|` over all anchors.
    pub max_q_sum_error: f64,
    /// Largest row spread of `Phi(end, s)` among anchors at least
    /// [`SPREAD_WINDOW`] rounds before the end.
    pub max_settled_spread: f64,
    /// Smallest count of entries above `1e-12` over the weight vectors used.
    pub min_positive_weights: usize,
    pub theta_fit: Option<(f64, f64)>,
    pub log_sum: Option<(f64, f64)>,
    pub bounds: Option<BoundConstants>,
    /// `d = |y(0) - z*|` as used in the bounds.
    pub initial_distance: f64,
    pub consensus: ConsensusTrace,
    pub z_star_first_order: bool,
    pub offline_all: Option<f64>,
    pub offline_regular: Option<f64>,
    /// `max_j Reg^j_T - Reg_T` and the `2 L sum zeta` it is compared with.
    pub dominance_gap: f64,
    pub dominance_limit: f64,
    pub gamma_hat: Option<usize>,
    pub fit: Option<LogFit>,
}

impl Analysis {
    pub fn bound_holds(&self, report: &RegretReport) -> Option<bool> {
        self.bounds
            .map(|b| report.network_regret[report.horizon() - 1] <= b.network_bound(report.horizon()))
    }

    pub fn dominance_holds(&self) -> bool {
        self.dominance_gap <= self.dominance_limit
    }
}

/// Constants realized by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Realized {
    pub f: usize,
    pub robustness: Option<usize>,
    pub rho: f64,
    pub lipschitz: f64,
    pub kappa: Option<f64>,
    pub step_offset: usize,
    pub gains: Option<Vec<f64>>,
    pub adversaries: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: RunConfig,
    pub graph: Graph,
    pub placement: AdversaryPlacement,
    pub assumptions: AssumptionReport,
    pub costs: CostStream,
    pub step: StepSchedule,
    pub realized: Realized,
    /// One record per simulated round, `rounds + tail` in total.
    pub records: Vec<RoundRecord>,
    pub matrices: Vec<MatrixSummary>,
    /// `weights[s]` estimates `q(s)`.
    pub weights: Vec<WeightEstimate>,
    pub report: RegretReport,
    pub analysis: Analysis,
}

impl Experiment {
    /// Regular states `x(t)` for `t = 0..=rounds + tail`.
    pub fn state(&self, t: usize) -> Vec<f64> {
        match self.records.get(t) {
            Some(r) => r.states(),
            None => self.records[t - 1].next.clone(),
        }
    }
}

fn build_network(config: &RunConfig) -> Result<(Graph, AdversaryPlacement, Option<usize>)> {
    match &config.graph {
        GraphSource::Load(path) => {
            let text = std::fs::read_to_string(path)?;
            let (graph, placement) = parse_graph_file(&text)?;
            Ok((graph, placement, None))
        }
        GraphSource::Generate { n, robustness } => {
            let r = match (robustness, config.f) {
                (Some(r), _) => *r,
                (None, FChoice::Fixed(f)) => 2 * f + 1,
                (None, FChoice::Auto) => return Err(Error::Config("f = auto needs a robustness".into())),
            };
            let graph = build_robust_graph(*n, r, seed::derive(config.seed, Purpose::Graph, 0, 0, 0))?;
            let placement_seed = seed::derive(config.seed, Purpose::Placement, 0, 0, 0);
            let candidates: Vec<usize> = match config.f {
                FChoice::Fixed(f) => vec![f],
                FChoice::Auto => (1..=(r.saturating_sub(1) / 2).max(1)).collect(),
            };
            let mut last = None;
            for f in candidates {
                match place_adversaries(&graph, config.adversaries, f, placement_seed, config.placement_attempts) {
                    Ok(p) => return Ok((graph, p, Some(r))),
                    Err(e) => last = Some(e),
                }
            }
            Err(last.expect("at least one candidate F"))
        }
    }
}

fn build_costs(config: &RunConfig, n: usize) -> Result<CostStream> {
    let cost_seed = seed::derive(config.seed, Purpose::Noise, 0, 0, 0);
    Ok(match config.costs {
        CostSpec::Sensor { true_x, sigma, h_min } => {
            CostStream::Sensor(SensorModel::draw(n, true_x, sigma, h_min, cost_seed)?)
        }
        CostSpec::Quadratic { rho, k2 } => {
            CostStream::Synthetic(StreamConfig::new(config.k1, k2, rho, cost_seed, SyntheticKind::Quadratic)?)
        }
        CostSpec::Piecewise { rho, k2, mu } => CostStream::Synthetic(StreamConfig::new(
            config.k1,
            k2,
            rho,
            cost_seed,
            SyntheticKind::Piecewise { mu },
        )?),
    })
}

/// Simulates `rounds + tail` rounds and runs the whole post-processing chain.
pub fn run_experiment(config: &RunConfig, exec: Exec) -> Result<Experiment> {
    config.validate()?;
    let (graph, placement, robustness) = build_network(config)?;
    let assumptions = check_assumptions_with(
        &graph,
        &placement,
        &CheckOptions {
            exhaustive_limit: config.exhaustive_limit,
            certified_robustness: robustness,
            kappa: None,
        },
    );
    if !assumptions.passes() {
        let failed: Vec<String> = assumptions
            .clauses()
            .into_iter()
            .filter(|c| c.1 == crate::graph::Verdict::Fail)
            .map(|(name, _, detail)| format!("{name}: {detail}"))
            .collect();
        if config.force {
            log::warn!("continuing despite failed assumptions: {}", failed.join("; "));
        } else {
            return Err(Error::AssumptionFailed(failed.join("; ")));
        }
    }

    let n = graph.vertex_count();
    let regular = placement.regular().to_vec();
    let costs = build_costs(config, n)?;
    let (lipschitz, rho) = costs.constants(&regular, config.k1)?;
    let offset = match config.step_offset {
        StepOffset::Fixed(o) => o,
        StepOffset::Auto => StepSchedule::auto_offset(rho, costs.max_curvature(&regular)),
    };
    let step = StepSchedule::new(rho, offset)?;

    let mut states = vec![0.0; n];
    for &i in &regular {
        let mut rng = seed::stream(config.seed, Purpose::Initial, i as u64, 0, 0);
        states[i] = if config.init_range > 0.0 {
            rng.gen_range(-config.init_range..=config.init_range)
        } else {
            0.0
        };
    }

    let ctx = RoundContext {
        graph: &graph,
        placement: &placement,
        strategy: config.strategy,
        adversary_seed: seed::derive(config.seed, Purpose::Adversary, 0, 0, 0),
        cap: config.cap,
        variant: config.variant,
        exec,
    };
    let total = config.rounds + config.tail;
    let mut records = Vec::with_capacity(total);
    let mut warned = false;
    for t in 0..total {
        let gradients: Vec<f64> = regular.iter().map(|&i| costs.cost(i, t).gradient(states[i])).collect();
        let (next, record) = run_round(&ctx, t, &states, &gradients, step.eta(t))?;
        if !warned && record.next.iter().any(|x| x.abs() > config.k1) {
            log::warn!("round {t}: a regular state left the ball of radius {}", config.k1);
            warned = true;
        }
        states = next;
        records.push(record);
    }

    let realized = Realized {
        f: placement.f(),
        robustness,
        rho,
        lipschitz,
        kappa: graph.kappa(),
        step_offset: offset,
        gains: match &costs {
            CostStream::Sensor(m) => Some(m.gains.clone()),
            CostStream::Synthetic(_) => None,
        },
        adversaries: placement.adversaries(),
    };
    let (matrices, weights, report, analysis) = analyze(config, &graph, &placement, &costs, &realized, &records, exec)?;
    Ok(Experiment {
        config: config.clone(),
        graph,
        placement,
        assumptions,
        costs,
        step,
        realized,
        records,
        matrices,
        weights,
        report,
        analysis,
    })
}

type Analyzed = (Vec<MatrixSummary>, Vec<WeightEstimate>, RegretReport, Analysis);

fn analyze(
    config: &RunConfig,
    graph: &Graph,
    placement: &AdversaryPlacement,
    costs: &CostStream,
    realized: &Realized,
    records: &[RoundRecord],
    exec: Exec,
) -> Result<Analyzed> {
    let horizon = config.rounds;
    let last = records.len() - 1;
    let regular = placement.regular();

    let matrices = build_all_matrices(records, placement, exec)?;
    let summaries: Vec<MatrixSummary> = exec.map_range(records.len(), |t| {
        let d = matrices[t].diagnose(graph, placement, &records[t]);
        MatrixSummary {
            round: t,
            residual: equivalence_residual(&matrices[t], &records[t]),
            max_row_sum_error: d.max_row_sum_error,
            negative_entries: d.negative_entries,
            sparsity_violations: d.sparsity_violations,
            diagonal_violations: d.diagonal_violations,
            min_strong_offdiagonal: d.min_strong_offdiagonal,
        }
    });
    let safety: usize = exec
        .map_slice(records, |r| safety_violations(placement, r).len())
        .iter()
        .sum();
    let weights = estimate_all_q(&matrices, last)?;
    let theta_fit = estimate_theta(&forward_spreads(&matrices[..=horizon])).ok();
    drop(matrices);

    // Round t = 1..=T uses x(t), f_t and alpha(t) = q(t+1).
    let schedule = WeightSchedule::from_estimates((1..=horizon).map(|t| weights[t + 1].q.clone()))?;
    let state_rows: Vec<Vec<f64>> = (1..=horizon).map(|t| records[t].states()).collect();
    let cost_rows: Vec<Vec<CostFunction>> = (1..=horizon)
        .map(|t| regular.iter().map(|&i| costs.cost(i, t)).collect())
        .collect();
    let report = regret_report(&state_rows, &cost_rows, &schedule, config.k1, config.beta, exec)?;

    let z = report.z_star;
    let f_z = objective(&cost_rows, &schedule, z);
    let slack = 1e-12 * f_z.abs().max(1.0);
    let z_star_first_order =
        objective(&cost_rows, &schedule, z + 1e-4) >= f_z - slack && objective(&cost_rows, &schedule, z - 1e-4) >= f_z - slack;

    let consensus = consensus_trace(&records[..=horizon], &weights[..=horizon])?;
    let x0 = records[0].states();
    let initial_distance = (consensus.y_direct[0] - z).abs();
    let initial_sum: f64 = x0.iter().map(|v| v.abs()).sum();
    let log_sum = theta_fit.and_then(|(c, theta)| {
        log_sum_constants(BOUND_SAFETY_FACTOR * c, theta, realized.lipschitz, realized.rho, regular.len(), initial_sum).ok()
    });
    let bounds = log_sum.and_then(|(c1, c2)| {
        theoretical_bounds_with_offset(realized.lipschitz, realized.rho, c1, c2, initial_distance, realized.step_offset).ok()
    });

    let (_, max_agent) = report.agent_extremes(horizon);
    let dominance_gap = max_agent - report.network_regret[horizon - 1];
    let dominance_limit = 2.0 * realized.lipschitz * consensus.deviation[1..=horizon].iter().sum::<f64>();

    let (offline_all, offline_regular) = match costs {
        CostStream::Sensor(model) => {
            let all: Vec<usize> = (0..graph.vertex_count()).collect();
            (
                offline_optimum(model, &all, 1..horizon + 1).ok(),
                offline_optimum(model, regular, 1..horizon + 1).ok(),
            )
        }
        CostStream::Synthetic(_) => (None, None),
    };

    let reduced = enumerate_reduced_graphs(
        graph,
        placement,
        config.reduced_budget,
        seed::derive(config.seed, Purpose::ReducedSample, 0, 0, 0),
    );
    let gamma_hat = min_reduced_size(&reduced);

    let burn_in = config.burn_in.min(horizon.saturating_sub(3)).max(1);
    let fit_points: Vec<(f64, f64)> = (burn_in..=horizon)
        .map(|t| (t as f64, report.network_regret[t - 1]))
        .collect();
    let fit = fit_log_polynomial(&fit_points).ok();

    let settled = last.saturating_sub(SPREAD_WINDOW);
    let analysis = Analysis {
        max_equivalence_residual: summaries.iter().map(|s| s.residual).fold(0.0, f64::max),
        max_row_sum_error: summaries.iter().map(|s| s.max_row_sum_error).fold(0.0, f64::max),
        matrix_violations: summaries
            .iter()
            .map(|s| s.negative_entries + s.sparsity_violations + s.diagonal_violations)
            .sum(),
        safety_violations: safety,
        max_q_sum_error: weights
            .iter()
            .map(|w| (w.q.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max),
        max_settled_spread: weights[..=settled].iter().map(|w| w.row_spread).fold(0.0, f64::max),
        min_positive_weights: weights[2..=horizon + 1]
            .iter()
            .map(|w| w.positive_count(1e-12))
            .min()
            .unwrap_or(0),
        theta_fit,
        log_sum,
        bounds,
        initial_distance,
        consensus,
        z_star_first_order,
        offline_all,
        offline_regular,
        dominance_gap,
        dominance_limit,
        gamma_hat,
        fit,
    };
    Ok((summaries, weights, report, analysis))
}
