use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use super::config::RunConfig;
use super::plot::{emit_plot, PlotOptions, Series};
use super::run::Experiment;
use crate::error::{Error, Result};
use crate::graph::write_graph_file;

pub const SOFTWARE_VERSION: &str = env!("CARGO_PKG_VERSION");

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Numeric(format!("csv: {other:?}")),
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One line of `regret.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretRow {
    pub t: usize,
    pub network: f64,
    pub agent_min: f64,
    pub agent_max: f64,
    pub bound: Option<f64>,
}

pub fn read_regret_csv(path: &Path) -> Result<Vec<RegretRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let bad = |what: &str| Error::Parse {
            line: k + 2,
            message: format!("bad {what} in {}", path.display()),
        };
        let field = |i: usize| rec.get(i).ok_or_else(|| bad("row length"));
        let num = |i: usize, what: &str| field(i)?.parse::<f64>().map_err(|_| bad(what));
        rows.push(RegretRow {
            t: field(0)?.parse().map_err(|_| bad("round"))?,
            network: num(1, "network regret")?,
            agent_min: num(2, "agent_min")?,
            agent_max: num(3, "agent_max")?,
            bound: match field(4)? {
                "" => None,
                _ => Some(num(4, "bound")?),
            },
        });
    }
    Ok(rows)
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or large magnitudes.
fn float(v: f64) -> String {
    format!("{v:?}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

/// Structured `key = value` summary. Keys under `config.` reproduce the
/// run exactly; no wall-clock data is included.
pub fn manifest_text(e: &Experiment) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("version", SOFTWARE_VERSION.to_string());
    for line in e.config.to_text().lines() {
        put(&format!("config.{}", line.split(" = ").next().unwrap_or("")), line.split(" = ").nth(1).unwrap_or("").to_string());
    }
    let r = &e.realized;
    put("realized.f", r.f.to_string());
    put("realized.robustness", opt(r.robustness));
    put("realized.regular", e.placement.regular_count().to_string());
    put("realized.rho", float(r.rho));
    put("realized.lipschitz", float(r.lipschitz));
    put("realized.kappa", opt(r.kappa));
    put("realized.step_offset", r.step_offset.to_string());
    put("realized.gamma_hat", opt(e.analysis.gamma_hat));
    put("realized.c_hat", opt(e.analysis.theta_fit.map(|f| f.0)));
    put("realized.theta_hat", opt(e.analysis.theta_fit.map(|f| f.1)));
    put(
        "realized.adversaries",
        r.adversaries.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "),
    );
    if let Some(g) = &r.gains {
        put("realized.gains", g.iter().map(|&h| float(h)).collect::<Vec<_>>().join(" "));
    }
    for (name, verdict, detail) in e.assumptions.clauses() {
        put(&format!("assumption.{name}"), format!("{} ({detail})", verdict.as_str()));
    }
    let a = &e.analysis;
    let rep = &e.report;
    let t = rep.horizon();
    let (lo, hi) = rep.agent_extremes(t);
    put("result.z_star", float(rep.z_star));
    put("result.z_star_first_order", a.z_star_first_order.to_string());
    put("result.network_regret", float(rep.network_regret[t - 1]));
    put("result.agent_regret_min", float(lo));
    put("result.agent_regret_max", float(hi));
    put("result.beta", float(rep.alpha_quality.beta));
    put("result.gamma_count", rep.alpha_quality.gamma_count.to_string());
    put("result.max_equivalence_residual", float(a.max_equivalence_residual));
    put("result.max_row_sum_error", float(a.max_row_sum_error));
    put("result.matrix_violations", a.matrix_violations.to_string());
    put("result.safety_violations", a.safety_violations.to_string());
    put("result.max_q_sum_error", float(a.max_q_sum_error));
    put("result.max_settled_spread", float(a.max_settled_spread));
    put("result.min_positive_weights", a.min_positive_weights.to_string());
    put("result.consensus_discrepancy", float(a.consensus.max_discrepancy()));
    put("result.initial_distance", float(a.initial_distance));
    put("result.c1", opt(a.log_sum.map(|c| c.0).map(float)));
    put("result.c2", opt(a.log_sum.map(|c| c.1).map(float)));
    if let Some(b) = a.bounds {
        for (k, v) in [("a1", b.a1), ("a2", b.a2), ("a3", b.a3), ("b1", b.b1), ("b2", b.b2), ("b3", b.b3)] {
            put(&format!("result.{k}"), float(v));
        }
        put("result.network_bound", float(b.network_bound(t)));
    }
    put("result.bound_holds", opt(a.bound_holds(rep)));
    put("result.dominance_gap", float(a.dominance_gap));
    put("result.dominance_limit", float(a.dominance_limit));
    put("result.offline_all", opt(a.offline_all.map(float)));
    put("result.offline_regular", opt(a.offline_regular.map(float)));
    if let Some(fit) = a.fit {
        put("result.fit", format!("{:?} {:?} {:?}", fit.a, fit.b, fit.c));
        put("result.fit_r_squared", float(fit.r_squared));
    }
    out
}

impl RunConfig {
    /// Recovers the configuration from a manifest written by [`write_outputs`].
    pub fn from_manifest(text: &str) -> Result<Self> {
        let body: String = text
            .lines()
            .filter_map(|l| l.strip_prefix("config."))
            .map(|l| format!("{l}\n"))
            .collect();
        if body.is_empty() {
            return Err(Error::Config("manifest has no config entries".into()));
        }
        RunConfig::parse(&body)
    }
}

/// Writes every artifact of `e` into `dir`, creating it if needed. Timing
/// goes to its own file so the rest stays byte-reproducible.
pub fn write_outputs(e: &Experiment, dir: &Path, elapsed: Option<Duration>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let regular = e.placement.regular();
    let horizon = e.config.rounds;

    write_csv(
        &dir.join("states.csv"),
        &["t", "agent", "value"],
        (0..=horizon).flat_map(|t| {
            let x = e.state(t);
            regular
                .iter()
                .zip(x)
                .map(move |(i, v)| vec![t.to_string(), i.to_string(), float(v)])
                .collect::<Vec<_>>()
        }),
    )?;

    let rep = &e.report;
    write_csv(
        &dir.join("regret.csv"),
        &["t", "network", "agent_min", "agent_max", "bound"],
        (1..=horizon).map(|t| {
            let (lo, hi) = rep.agent_extremes(t);
            vec![
                t.to_string(),
                float(rep.network_regret[t - 1]),
                float(lo),
                float(hi),
                e.analysis.bounds.map_or(String::new(), |b| float(b.network_bound(t))),
            ]
        }),
    )?;

    let c = &e.analysis.consensus;
    write_csv(
        &dir.join("analysis.csv"),
        &["t", "y", "y_recursive", "deviation", "q_positive", "q_min_positive", "row_spread"],
        (0..=horizon).map(|t| {
            let w = &e.weights[t];
            vec![
                t.to_string(),
                float(c.y_direct[t]),
                float(c.y_recursive[t]),
                float(c.deviation[t]),
                w.positive_count(1e-12).to_string(),
                opt(w.min_positive(1e-12).map(float)),
                float(w.row_spread),
            ]
        }),
    )?;

    write_csv(
        &dir.join("matrices.csv"),
        &["round", "residual", "row_sum_error", "negative", "sparsity", "diagonal", "min_strong_offdiagonal"],
        e.matrices.iter().map(|m| {
            vec![
                m.round.to_string(),
                float(m.residual),
                float(m.max_row_sum_error),
                m.negative_entries.to_string(),
                m.sparsity_violations.to_string(),
                m.diagonal_violations.to_string(),
                m.min_strong_offdiagonal.to_string(),
            ]
        }),
    )?;

    fs::write(dir.join("graph.txt"), write_graph_file(&e.graph, &e.placement))?;
    fs::write(dir.join("manifest.txt"), manifest_text(e))?;
    if let Some(d) = elapsed {
        fs::write(dir.join("timing.txt"), format!("wall_clock_seconds = {:.3}\n", d.as_secs_f64()))?;
    }
    emit_plot(&regret_series(rep), &PlotOptions::regret(), &dir.join("regret.svg"))
}

/// Network regret and the extreme agent regrets, each divided by `T`.
pub(crate) fn regret_series(rep: &crate::regret::RegretReport) -> Vec<Series> {
    let horizon = rep.horizon();
    let per_t = |f: &dyn Fn(usize) -> f64| (1..=horizon).map(|t| (t as f64, f(t) / t as f64)).collect();
    vec![
        Series::new("network regret / T", per_t(&|t| rep.network_regret[t - 1])),
        Series::new("max agent regret / T", per_t(&|t| rep.agent_extremes(t).1)),
        Series::new("min agent regret / T", per_t(&|t| rep.agent_extremes(t).0)),
    ]
}
