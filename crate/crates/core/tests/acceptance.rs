//! End-to-end acceptance checks, one test per criterion. Each test prints a
//! single PASS/FAIL line before asserting.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_r_robust, naive_trimmed_mean, report};
use resilient_ogd::costs::{step_size, CostFunction, CostShape, SensorModel, StepSchedule};
use resilient_ogd::equivalence::{build_matrix, log_sum_constants, zeta_bound};
use resilient_ogd::graph::{build_robust_graph, is_r_robust, AdversaryPlacement, Graph};
use resilient_ogd::harness::{run_experiment, CostSpec, Experiment, FChoice, GraphSource, RunConfig};
use resilient_ogd::protocol::{run_round, AdversaryStrategy, FilterVariant, RoundContext};
use resilient_ogd::regret::{offline_optimum, solve_z_star, solve_z_star_generic, theoretical_bounds, LogFit, WeightSchedule};
use resilient_ogd::{Error, Exec};

const LARGE_SEEDS: std::ops::RangeInclusive<u64> = 1..=10;
const CHECKPOINTS: [usize; 4] = [100, 250, 500, 1000];

/// What the criteria need from one 100-agent run; the full experiment is
/// dropped to keep memory flat.
struct LargeRun {
    seed: u64,
    f: usize,
    regular: usize,
    adversaries: usize,
    f_local: bool,
    network: Vec<f64>,
    agent_min: Vec<f64>,
    agent_max: Vec<f64>,
    fit: Option<LogFit>,
    deviation_50: f64,
    deviation_1000: f64,
    z_first_order: bool,
    q_sum_error: f64,
    settled_spread: f64,
    min_positive: usize,
    seconds: f64,
}

fn summarize(seed: u64, e: &Experiment, seconds: f64) -> LargeRun {
    let last = e.records.len() - 1;
    let per_t = |series: &dyn Fn(usize) -> f64| CHECKPOINTS.iter().map(|&t| series(t) / t as f64).collect();
    LargeRun {
        seed,
        f: e.realized.f,
        regular: e.placement.regular_count(),
        adversaries: e.placement.adversaries().len(),
        f_local: e.placement.is_f_local(&e.graph),
        network: per_t(&|t| e.report.network_regret[t - 1]),
        agent_min: per_t(&|t| e.report.agent_extremes(t).0),
        agent_max: per_t(&|t| e.report.agent_extremes(t).1),
        fit: e.analysis.fit,
        deviation_50: e.analysis.consensus.deviation[50],
        deviation_1000: e.analysis.consensus.deviation[1000],
        z_first_order: e.analysis.z_star_first_order,
        q_sum_error: e
            .weights
            .iter()
            .map(|w| (w.q.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max),
        settled_spread: e.weights[..=last - 200].iter().map(|w| w.row_spread).fold(0.0, f64::max),
        min_positive: e.weights.iter().map(|w| w.positive_count(1e-12)).min().unwrap_or(0),
        seconds,
    }
}

fn large_runs() -> &'static [LargeRun] {
    static RUNS: OnceLock<Vec<LargeRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        LARGE_SEEDS
            .map(|seed| {
                let mut config = RunConfig::paper();
                config.seed = seed;
                let start = Instant::now();
                let e = run_experiment(&config, Exec::default()).expect("paper preset runs");
                summarize(seed, &e, start.elapsed().as_secs_f64())
            })
            .collect()
    })
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Twenty small configurations that pass the exhaustive assumption check.
fn small_suite() -> &'static [Experiment] {
    static SUITE: OnceLock<Vec<Experiment>> = OnceLock::new();
    SUITE.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let strategies = [
            AdversaryStrategy::Conflicting { lo: -10.0, hi: 10.0 },
            AdversaryStrategy::Uniform { lo: -50.0, hi: 50.0 },
            AdversaryStrategy::Constant { value: 1e6 },
            AdversaryStrategy::TrackingOffset { offset: 0.5 },
        ];
        (0..20)
            .map(|k| {
                let f = 1 + k % 2;
                let r = 2 * f + 1;
                let n = rng.gen_range(2 * r + 1..=14);
                let mut config = RunConfig::desk();
                config.graph = GraphSource::Generate { n, robustness: Some(r) };
                config.f = FChoice::Fixed(f);
                config.strategy = strategies[k % strategies.len()];
                config.seed = rng.gen();
                config.rounds = 50;
                config.tail = 10;
                config.exhaustive_limit = 14;
                config.costs = CostSpec::Sensor { true_x: rng.gen_range(-5.0..5.0), sigma: 1.0, h_min: 0.1 };
                let mut count = rng.gen_range(1..=3);
                loop {
                    config.adversaries = count;
                    match run_experiment(&config, Exec::default()) {
                        Ok(e) => {
                            assert!(e.assumptions.fully_verified() && e.assumptions.passes());
                            break e;
                        }
                        Err(Error::AssumptionFailed(_)) if count > 0 => count -= 1,
                        Err(other) => panic!("configuration {k} failed: {other}"),
                    }
                }
            })
            .collect()
    })
}

#[test]
fn criterion_01_equivalence_oracle() {
    let suite = small_suite();
    let mut rounds = 0;
    let mut worst_residual: f64 = 0.0;
    let mut worst_row: f64 = 0.0;
    let mut diag_failures = 0;
    let mut other_failures = 0;
    for e in suite {
        let regular = e.placement.regular();
        let f = e.placement.f();
        for record in &e.records {
            rounds += 1;
            let m = build_matrix(record, &e.placement).unwrap();
            let x = DVector::from_vec(record.states());
            let mx = &m.entries * &x;
            let full = e.state(record.round);
            let mut all_states = vec![0.0; e.graph.vertex_count()];
            for (&i, &v) in regular.iter().zip(&full) {
                all_states[i] = v;
            }
            for (k, &i) in regular.iter().enumerate() {
                // independent recomputation of x_i(t+1) from the transmissions
                let received: Vec<f64> = record.outcomes[k].received().map(|t| t.value).collect();
                assert_eq!(received.len(), e.graph.degree(i));
                let expected = naive_trimmed_mean(all_states[i], received, f) - record.eta * record.gradients[k];
                worst_residual = worst_residual
                    .max((mx[k] - record.eta * record.gradients[k] - expected).abs())
                    .max((mx[k] - record.eta * record.gradients[k] - record.next[k]).abs());
                let row = m.entries.row(k);
                worst_row = worst_row.max((row.sum() - 1.0).abs());
                let floor = 1.0 / (e.graph.degree(i) - 2 * f + 1) as f64;
                if row[k] < floor * (1.0 - 1e-12) {
                    diag_failures += 1;
                }
                other_failures += row.iter().filter(|&&v| v < 0.0).count();
                other_failures += row
                    .iter()
                    .enumerate()
                    .filter(|&(j, &v)| j != k && v != 0.0 && !e.graph.has_edge(i, regular[j]))
                    .count();
            }
        }
    }
    let pass = suite.len() >= 20
        && rounds >= 1000
        && worst_residual < 1e-9
        && worst_row <= 1e-12
        && diag_failures == 0
        && other_failures == 0;
    report(
        1,
        pass,
        &format!(
            "{} configs, {rounds} rounds, max residual {worst_residual:.2e}, max |row sum - 1| {worst_row:.2e}, diagonal failures {diag_failures}, sign/sparsity failures {other_failures}",
            suite.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_safety() {
    let suite = small_suite();
    let mut checked = 0;
    let mut violations = 0;
    for e in suite {
        let regular = e.placement.regular();
        for record in &e.records {
            let x = record.states();
            let value = |v: usize| x[e.placement.regular_index(v).unwrap()];
            for (k, &i) in regular.iter().enumerate() {
                let (lo, hi) = e
                    .graph
                    .neighbors(i)
                    .iter()
                    .copied()
                    .filter(|&j| !e.placement.is_adversarial(j))
                    .chain([i])
                    .map(value)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                let update = record.next[k] + record.eta * record.gradients[k];
                let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
                checked += 1;
                if update < lo - slack || update > hi + slack {
                    violations += 1;
                }
            }
        }
    }
    let pass = violations == 0;
    report(2, pass, &format!("{checked} agent-rounds checked, {violations} outside the regular hull"));
    assert!(pass);
}

#[test]
fn criterion_03_robustness_oracle() {
    let start = Instant::now();
    let mut graphs = 0;
    let mut disagreements = Vec::new();
    for seed in 0..50u64 {
        for r in 1..=4usize {
            for n in 2 * r + 1..=10 {
                let g = build_robust_graph(n, r, seed).unwrap();
                graphs += 1;
                let fast = is_r_robust(&g, r).unwrap();
                let oracle = brute_force_r_robust(&g, r);
                if !(fast && oracle) {
                    disagreements.push((seed, n, r, fast, oracle));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = disagreements.is_empty() && secs < 300.0;
    report(
        3,
        pass,
        &format!("{graphs} graphs (N <= 10, 50 seeds), {} failures, {secs:.1} s", disagreements.len()),
    );
    assert!(pass, "{disagreements:?}");
}

#[test]
fn criterion_04_large_network_experiment() {
    let mut config = RunConfig::paper();
    config.seed = 1;
    let start = Instant::now();
    let e = run_experiment(&config, Exec::default()).unwrap();
    let run = summarize(1, &e, start.elapsed().as_secs_f64());
    drop(e);
    let pass = run.regular + run.adversaries == 100
        && run.adversaries == 15
        && run.f_local
        && strictly_decreasing(&run.network)
        && strictly_decreasing(&run.agent_max)
        && strictly_decreasing(&run.agent_min)
        && run.seconds < 300.0;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" > ");
    report(
        4,
        pass,
        &format!(
            "seed 1, F = {}: network/T {}; max agent/T {}; min agent/T {}; {:.1} s",
            run.f,
            fmt(&run.network),
            fmt(&run.agent_max),
            fmt(&run.agent_min),
            run.seconds
        ),
    );
    // Other seeds, reported only; the minimum agent curve is the noisiest.
    let others = large_runs()
        .iter()
        .filter(|r| strictly_decreasing(&r.network) && strictly_decreasing(&r.agent_max) && strictly_decreasing(&r.agent_min))
        .count();
    let _ = std::io::Write::write_all(
        &mut std::io::stdout(),
        format!("[acceptance]   all three curves decreasing on {others}/{} seeds\n", large_runs().len()).as_bytes(),
    );
    assert!(pass);
}

#[test]
fn criterion_05_functional_form() {
    let runs = large_runs();
    let mut worst_r2: f64 = 1.0;
    let mut min_c = f64::INFINITY;
    let mut failed = Vec::new();
    for r in runs {
        match r.fit {
            Some(fit) => {
                worst_r2 = worst_r2.min(fit.r_squared);
                min_c = min_c.min(fit.c);
                if !(fit.r_squared >= 0.95 && fit.c >= 0.0) {
                    failed.push(r.seed);
                }
            }
            None => failed.push(r.seed),
        }
    }
    let pass = runs.len() >= 10 && failed.is_empty();
    report(
        5,
        pass,
        &format!("{} seeds, min R^2 {worst_r2:.4}, min c {min_c:.4}, failing seeds {failed:?}", runs.len()),
    );
    assert!(pass);
}

fn spread(x: &[f64]) -> f64 {
    x.iter().copied().fold(f64::NEG_INFINITY, f64::max) - x.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Rounds until the regular spread drops below `tol`, with no steps and no adversaries.
fn rounds_to_consensus(graph: &Graph, f: usize, seed: u64, tol: f64, max_rounds: usize) -> Option<usize> {
    let placement = AdversaryPlacement::honest(graph.vertex_count(), f);
    let ctx = RoundContext {
        graph,
        placement: &placement,
        strategy: AdversaryStrategy::Constant { value: 0.0 },
        adversary_seed: 0,
        cap: 1e6,
        variant: FilterVariant::Literal,
        exec: Exec::Sequential,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..graph.vertex_count()).map(|_| rng.gen_range(-10.0..10.0)).collect();
    let zeros = vec![0.0; graph.vertex_count()];
    for t in 0..=max_rounds {
        if spread(&x) < tol {
            return Some(t);
        }
        x = run_round(&ctx, t, &x, &zeros, 0.0).unwrap().0;
    }
    None
}

#[test]
fn criterion_06_consensus_contraction() {
    let runs = large_runs();
    let shrinking = runs.iter().filter(|r| r.deviation_1000 < r.deviation_50).count();
    let graphs: Vec<(&str, Graph, usize)> = vec![
        ("K8", Graph::complete(8), 1),
        ("C6", Graph::cycle(6), 0),
        ("P5", Graph::path(5), 0),
        ("robust(20,3)", build_robust_graph(20, 3, 4).unwrap(), 1),
        ("robust(30,5)", build_robust_graph(30, 5, 8).unwrap(), 2),
        ("robust(100,7)", build_robust_graph(100, 7, 1).unwrap(), 3),
    ];
    let mut slow = Vec::new();
    let mut worst = 0;
    for (name, g, f) in &graphs {
        match rounds_to_consensus(g, *f, 99, 1e-9, 500) {
            Some(t) => worst = worst.max(t),
            None => slow.push(*name),
        }
    }
    let pass = shrinking == runs.len() && slow.is_empty();
    report(
        6,
        pass,
        &format!(
            "deviation(1000) < deviation(50) on {shrinking}/{} runs; zero-step consensus below 1e-9 on {}/{} graphs (worst {worst} rounds)",
            runs.len(),
            graphs.len() - slow.len(),
            graphs.len()
        ),
    );
    assert!(pass, "slow graphs: {slow:?}");
}

#[test]
fn criterion_07_analytic_cross_checks() {
    // step-size sums up to 10^6
    let mut step_ok = true;
    for (rho, offset) in [(0.01, 0usize), (0.5, 0), (3.0, 0), (0.0117, 335)] {
        let schedule = StepSchedule::new(rho, offset).unwrap();
        let mut sum = 0.0;
        for t in 1..=1_000_000usize {
            sum += schedule.eta(t);
            if sum > (1.0 + (t as f64).ln()) / rho * (1.0 + 1e-12) {
                step_ok = false;
            }
        }
        step_ok &= step_size(0, rho).unwrap() == 0.0;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut zeta_ok = 0;
    for _ in 0..100 {
        let c = rng.gen_range(0.01..10.0);
        let theta = rng.gen_range(0.0..0.999);
        let l = rng.gen_range(0.01..100.0);
        let rho = rng.gen_range(0.01..5.0);
        let regular = rng.gen_range(1..100);
        let s = rng.gen_range(0.0..100.0);
        let horizon = rng.gen_range(1..2000);
        let eta = |t: usize| if t == 0 { 0.0 } else { 1.0 / (rho * t as f64) };
        let total: f64 = (1..=horizon).map(|k| zeta_bound(k, c, theta, l, regular, eta, s).unwrap()).sum();
        let (c1, c2) = log_sum_constants(c, theta, l, rho, regular, s).unwrap();
        if total <= (c1 + c2 * (1.0 + (horizon as f64).ln())) * (1.0 + 1e-12) {
            zeta_ok += 1;
        }
    }

    let mut identity_ok = 0;
    for _ in 0..100 {
        let (l, rho) = (rng.gen_range(0.01..100.0), rng.gen_range(0.01..5.0));
        let (c1, c2, d) = (rng.gen_range(0.0..1e4), rng.gen_range(0.0..1e6), rng.gen_range(0.0..100.0));
        let b = theoretical_bounds(l, rho, c1, c2, d).unwrap();
        let tol = 1e-12 * b.b2.abs().max(b.b1.abs()).max(1.0);
        if (b.b1 - b.a1 - 2.0 * l * c1).abs() <= tol && (b.b2 - b.a2 - 2.0 * l * c2).abs() <= tol && b.b3 == b.a3 {
            identity_ok += 1;
        }
    }
    let pass = step_ok && zeta_ok == 100 && identity_ok == 100;
    report(
        7,
        pass,
        &format!("step sums to 1e6: {step_ok}; zeta sum bound {zeta_ok}/100; B - A identities {identity_ok}/100"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_z_star_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let agents = rng.gen_range(1..10);
        let rounds = rng.gen_range(1..30);
        let costs: Vec<Vec<CostFunction>> = (0..rounds)
            .map(|t| {
                (0..agents)
                    .map(|i| CostFunction {
                        owner: i,
                        round: t,
                        shape: CostShape::Sensor { gain: rng.gen_range(0.1..2.0), measurement: rng.gen_range(-30.0..30.0) },
                    })
                    .collect()
            })
            .collect();
        let alpha: Vec<Vec<f64>> = (0..rounds)
            .map(|_| {
                let w: Vec<f64> = (0..agents).map(|_| rng.gen_range(0.01..1.0)).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|v| v / s).collect()
            })
            .collect();
        let schedule = WeightSchedule::from_estimates(alpha).unwrap();
        let closed = solve_z_star(&costs, &schedule, 100.0).unwrap();
        let generic = solve_z_star_generic(&costs, &schedule, -100.0, 100.0).unwrap();
        worst = worst.max((closed - generic).abs());
    }
    let runs = large_runs();
    let suite = small_suite();
    let first_order = runs.iter().filter(|r| r.z_first_order).count()
        + suite.iter().filter(|e| e.analysis.z_star_first_order).count();
    let total = runs.len() + suite.len();
    let pass = worst < 1e-8 && first_order == total;
    report(
        8,
        pass,
        &format!("generic vs closed form max gap {worst:.2e} over 100 instances; first-order optimal on {first_order}/{total} runs"),
    );
    assert!(pass);
}

#[test]
fn criterion_09_weight_quality() {
    let runs = large_runs();
    let sum_err = runs.iter().map(|r| r.q_sum_error).fold(0.0, f64::max);
    let spread = runs.iter().map(|r| r.settled_spread).fold(0.0, f64::max);
    let short = runs.iter().filter(|r| r.min_positive < r.f + 1).count();
    let min_positive = runs.iter().map(|r| r.min_positive).min().unwrap_or(0);
    let pass = sum_err <= 1e-10 && spread < 1e-6 && short == 0;
    report(
        9,
        pass,
        &format!(
            "{} runs: max |sum q - 1| {sum_err:.2e}, max settled row spread {spread:.2e}, min positive entries {min_positive} (need F + 1), short runs {short}",
            runs.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_offline_noiseless_recovery() {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let true_x = -7.5 + seed as f64 * 0.77;
        let model = SensorModel::draw(100, true_x, 0.0, 0.1, seed).unwrap();
        let all: Vec<usize> = (0..100).collect();
        let some: Vec<usize> = (0..100).filter(|i| i % 7 != 0).collect();
        for agents in [&all, &some] {
            worst = worst.max((offline_optimum(&model, agents, 1..1001).unwrap() - true_x).abs());
        }
    }
    let mut config = RunConfig::paper();
    config.costs = CostSpec::Sensor { true_x: 2.5, sigma: 0.0, h_min: 0.1 };
    config.rounds = 200;
    let e = run_experiment(&config, Exec::default()).unwrap();
    for v in [e.analysis.offline_all.unwrap(), e.analysis.offline_regular.unwrap()] {
        worst = worst.max((v - 2.5).abs());
    }
    let pass = worst < 1e-10;
    report(10, pass, &format!("max |x* - true_x| {worst:.2e} over 41 noiseless cases"));
    assert!(pass);
}
