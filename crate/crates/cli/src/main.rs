//! `rogd`: generate and check networks, run experiments, and inspect results.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use resilient_ogd::graph::{
    build_robust_graph, check_assumptions_with, parse_graph_file, place_adversaries, write_graph_file, AdversaryPlacement,
    CheckOptions, DEFAULT_EXHAUSTIVE_LIMIT,
};
use resilient_ogd::harness::{
    emit_plot, read_regret_csv, run_experiment, write_outputs, PlotOptions, RunConfig, Series,
};
use resilient_ogd::regret::fit_log_polynomial;
use resilient_ogd::seed::{self, Purpose};
use resilient_ogd::{Error, Exec};

#[derive(Parser)]
#[command(name = "rogd", version, about = "Byzantine-resilient online distributed gradient descent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or check network files.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Run an experiment and write its outputs.
    Run(RunArgs),
    /// Summarize regret.csv from an output directory.
    Analyze {
        dir: PathBuf,
        /// Comma-separated checkpoints for regret / T.
        #[arg(long, default_value = "100,250,500,1000")]
        checkpoints: String,
    },
    /// Redraw the regret chart from regret.csv.
    Plot {
        dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use a linear time axis.
        #[arg(long)]
        linear: bool,
    },
    /// Rerun an experiment from its manifest and compare outputs byte for byte.
    Replay {
        dir: PathBuf,
        /// Where to write the rerun; defaults to DIR/replay.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Build a robust graph and place F-local adversaries.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: usize,
        /// Target robustness; defaults to 2F + 1.
        #[arg(long)]
        robustness: Option<usize>,
        #[arg(long, default_value_t = 0)]
        adversaries: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the network assumptions for a graph file.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
        exhaustive_limit: usize,
        /// Robustness known from construction, trusted above the exhaustive limit.
        #[arg(long)]
        certified: Option<usize>,
        /// Minimum edge weight.
        #[arg(long)]
        kappa: Option<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from a named preset (desk or paper).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rounds: Option<usize>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Proceed even if the assumptions fail.
    #[arg(long)]
    force: bool,
    /// Disable the data-parallel paths.
    #[arg(long)]
    sequential: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

enum Failure {
    Assumption(String),
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::AssumptionFailed(_) | Error::ProtocolViolation { .. } | Error::AdversaryBudgetViolated { .. } => {
                Failure::Assumption(e.to_string())
            }
            Error::Config(_) | Error::Parse { .. } | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Graph(GraphCommand::Gen { n, f, robustness, adversaries, seed, out }) => {
            graph_gen(n, f, robustness, adversaries, seed, out.as_deref())
        }
        Command::Graph(GraphCommand::Check { file, exhaustive_limit, certified, kappa }) => {
            graph_check(&file, exhaustive_limit, certified, kappa)
        }
        Command::Run(args) => run(args),
        Command::Analyze { dir, checkpoints } => analyze(&dir, &checkpoints),
        Command::Plot { dir, out, linear } => plot(&dir, out, linear),
        Command::Replay { dir, out } => replay(&dir, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assumption(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
    }
}

fn graph_gen(n: usize, f: usize, robustness: Option<usize>, count: usize, seed: u64, out: Option<&Path>) -> Outcome {
    let r = robustness.unwrap_or(2 * f + 1);
    let graph = build_robust_graph(n, r, seed::derive(seed, Purpose::Graph, 0, 0, 0))?;
    let placement = if count == 0 {
        AdversaryPlacement::honest(n, f)
    } else {
        place_adversaries(&graph, count, f, seed::derive(seed, Purpose::Placement, 0, 0, 0), 64)?
    };
    let text = format!("# robust graph, n = {n}, r = {r}, seed = {seed}\n{}", write_graph_file(&graph, &placement));
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn graph_check(file: &Path, exhaustive_limit: usize, certified: Option<usize>, kappa: Option<f64>) -> Outcome {
    let (graph, placement) = parse_graph_file(&fs::read_to_string(file)?)?;
    let report = check_assumptions_with(
        &graph,
        &placement,
        &CheckOptions { exhaustive_limit, certified_robustness: certified, kappa },
    );
    for (name, verdict, detail) in report.clauses() {
        println!("{name:<12} {:<10} {detail}", verdict.as_str());
    }
    if report.passes() {
        if !report.fully_verified() {
            println!("note: some clauses could not be verified at this size");
        }
        Ok(())
    } else {
        Err(Failure::Assumption(format!("{} does not satisfy the network assumptions", file.display())))
    }
}

fn build_config(args: &RunArgs) -> Result<RunConfig, Failure> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), _) => RunConfig::parse(&fs::read_to_string(path)?)?,
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => RunConfig::default(),
    };
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(r) = args.rounds {
        config.rounds = r;
    }
    for kv in &args.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("override '{kv}' is not KEY=VALUE")))?;
        config.set(k.trim(), v.trim())?;
    }
    config.force |= args.force;
    config.validate()?;
    Ok(config)
}

fn run(args: RunArgs) -> Outcome {
    let config = build_config(&args)?;
    let exec = if args.sequential { Exec::Sequential } else { Exec::default() };
    let start = Instant::now();
    let e = run_experiment(&config, exec)?;
    write_outputs(&e, &args.out, Some(start.elapsed()))?;
    let t = e.report.horizon();
    let (lo, hi) = e.report.agent_extremes(t);
    println!("F = {}, regular agents = {}", e.realized.f, e.placement.regular_count());
    println!("z* = {}", e.report.z_star);
    println!("network regret / T = {}", e.report.network_regret[t - 1] / t as f64);
    println!("agent regret / T in [{}, {}]", lo / t as f64, hi / t as f64);
    println!("outputs in {}", args.out.display());
    Ok(())
}

fn analyze(dir: &Path, checkpoints: &str) -> Outcome {
    let rows = read_regret_csv(&dir.join("regret.csv"))?;
    if rows.is_empty() {
        return Err(Failure::Usage("regret.csv is empty".into()));
    }
    let marks: Vec<usize> = checkpoints
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| Failure::Usage(format!("bad checkpoint '{s}'"))))
        .collect::<Result<_, _>>()?;
    println!("{:>8} {:>16} {:>16} {:>16}", "T", "network/T", "agent_min/T", "agent_max/T");
    for t in marks.into_iter().filter(|&t| t >= 1 && t <= rows.len()) {
        let r = &rows[t - 1];
        let tf = t as f64;
        println!("{t:>8} {:>16.6} {:>16.6} {:>16.6}", r.network / tf, r.agent_min / tf, r.agent_max / tf);
    }
    let burn_in = 50.min(rows.len() / 2).max(1);
    let points: Vec<(f64, f64)> = rows[burn_in - 1..].iter().map(|r| (r.t as f64, r.network)).collect();
    match fit_log_polynomial(&points) {
        Ok(fit) => println!(
            "fit: {:.4} + {:.4} (1 + ln T) + {:.4} (1 + ln T)^2, R^2 = {:.4}",
            fit.a, fit.b, fit.c, fit.r_squared
        ),
        Err(e) => println!("fit unavailable: {e}"),
    }
    Ok(())
}

fn plot(dir: &Path, out: Option<PathBuf>, linear: bool) -> Outcome {
    let rows = read_regret_csv(&dir.join("regret.csv"))?;
    let per_t = |f: fn(&resilient_ogd::harness::RegretRow) -> f64| {
        rows.iter().map(|r| (r.t as f64, f(r) / r.t as f64)).collect::<Vec<_>>()
    };
    let series = vec![
        Series::new("network regret / T", per_t(|r| r.network)),
        Series::new("max agent regret / T", per_t(|r| r.agent_max)),
        Series::new("min agent regret / T", per_t(|r| r.agent_min)),
    ];
    let options = PlotOptions { log_x: !linear, ..PlotOptions::regret() };
    let path = out.unwrap_or_else(|| dir.join("regret.svg"));
    emit_plot(&series, &options, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}

const COMPARED: [&str; 6] = ["states.csv", "regret.csv", "analysis.csv", "matrices.csv", "graph.txt", "manifest.txt"];

fn replay(dir: &Path, out: Option<PathBuf>) -> Outcome {
    let config = RunConfig::from_manifest(&fs::read_to_string(dir.join("manifest.txt"))?)?;
    let target = out.unwrap_or_else(|| dir.join("replay"));
    let e = run_experiment(&config, Exec::default())?;
    write_outputs(&e, &target, None)?;
    let mut differing = Vec::new();
    for name in COMPARED {
        if fs::read(dir.join(name))? != fs::read(target.join(name))? {
            differing.push(name);
        }
    }
    if differing.is_empty() {
        println!("replay identical ({} files compared)", COMPARED.len());
        Ok(())
    } else {
        Err(Failure::Runtime(format!("replay differs in {}", differing.join(", "))))
    }
}
