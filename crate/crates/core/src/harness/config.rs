use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::protocol::{AdversaryStrategy, FilterVariant};

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    /// Preferential-attachment graph; `robustness` defaults to `2F + 1`.
    Generate { n: usize, robustness: Option<usize> },
    /// Edge-list file, which also fixes `F` and the adversary set.
    Load(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FChoice {
    /// Smallest `F` for which an F-local placement of the requested size exists.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostSpec {
    Sensor { true_x: f64, sigma: f64, h_min: f64 },
    Quadratic { rho: f64, k2: f64 },
    Piecewise { rho: f64, k2: f64, mu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOffset {
    /// Smallest offset keeping `eta(1)` times the largest curvature at most 1.
    Auto,
    Fixed(usize),
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph: GraphSource,
    pub f: FChoice,
    pub adversaries: usize,
    pub strategy: AdversaryStrategy,
    /// Adversarial transmissions are clamped to `[-cap, cap]`.
    pub cap: f64,
    pub costs: CostSpec,
    /// Radius of the ball the gradient bound is taken over.
    pub k1: f64,
    pub rounds: usize,
    /// Extra rounds simulated past `rounds` so late weight vectors converge.
    pub tail: usize,
    pub seed: u64,
    pub variant: FilterVariant,
    pub step_offset: StepOffset,
    /// Initial regular states are uniform in `[-init_range, init_range]`.
    pub init_range: f64,
    pub force: bool,
    pub exhaustive_limit: usize,
    pub placement_attempts: usize,
    /// Threshold for the weight-quality count; `None` uses half the smallest positive weight.
    pub beta: Option<f64>,
    /// Reduced-graph enumeration budget.
    pub reduced_budget: usize,
    /// Rounds excluded from the functional-form fit.
    pub burn_in: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::desk()
    }
}

impl RunConfig {
    /// Small configuration that runs in seconds.
    pub fn desk() -> Self {
        RunConfig {
            graph: GraphSource::Generate { n: 30, robustness: None },
            f: FChoice::Fixed(2),
            adversaries: 4,
            strategy: AdversaryStrategy::Conflicting { lo: -10.0, hi: 10.0 },
            cap: 1e6,
            costs: CostSpec::Sensor { true_x: 1.0, sigma: 1.0, h_min: 0.1 },
            k1: 100.0,
            rounds: 2000,
            tail: 300,
            seed: 1,
            variant: FilterVariant::Literal,
            step_offset: StepOffset::Auto,
            init_range: 10.0,
            force: false,
            exhaustive_limit: crate::graph::DEFAULT_EXHAUSTIVE_LIMIT,
            placement_attempts: 64,
            beta: None,
            reduced_budget: 300,
            burn_in: 50,
        }
    }

    /// 100 sensors, 15 of them Byzantine, 1000 rounds.
    pub fn paper() -> Self {
        RunConfig {
            graph: GraphSource::Generate { n: 100, robustness: Some(7) },
            f: FChoice::Auto,
            adversaries: 15,
            rounds: 1000,
            ..RunConfig::desk()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "desk" => Ok(RunConfig::desk()),
            "paper" => Ok(RunConfig::paper()),
            other => Err(Error::Config(format!("unknown preset '{other}'"))),
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. A `preset` line
    /// must come first if present.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        let mut seen_setting = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key == "preset" {
                if seen_setting {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: "preset must precede other settings".into(),
                    });
                }
                config = RunConfig::preset(value)?;
                continue;
            }
            seen_setting = true;
            config.set(key, value).map_err(|e| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad value '{value}' for {key}")))
        }
        match key {
            "n" => {
                let n = num(key, value)?;
                self.graph = match self.graph {
                    GraphSource::Generate { robustness, .. } => GraphSource::Generate { n, robustness },
                    GraphSource::Load(_) => GraphSource::Generate { n, robustness: None },
                };
            }
            "robustness" => {
                let r = if value == "auto" { None } else { Some(num(key, value)?) };
                self.graph = match self.graph {
                    GraphSource::Generate { n, .. } => GraphSource::Generate { n, robustness: r },
                    GraphSource::Load(_) => return Err(Error::Config("robustness applies to generated graphs".into())),
                };
            }
            "graph_file" => self.graph = GraphSource::Load(PathBuf::from(value)),
            "f" => self.f = if value == "auto" { FChoice::Auto } else { FChoice::Fixed(num(key, value)?) },
            "adversaries" => self.adversaries = num(key, value)?,
            "strategy" => self.strategy = value.parse()?,
            "cap" => self.cap = num(key, value)?,
            "costs" => {
                let (rho, k2, mu) = self.synthetic_parts();
                self.costs = match value {
                    "sensor" => CostSpec::Sensor { true_x: 1.0, sigma: 1.0, h_min: 0.1 },
                    "quadratic" => CostSpec::Quadratic { rho, k2 },
                    "piecewise" => CostSpec::Piecewise { rho, k2, mu },
                    other => return Err(Error::Config(format!("unknown cost family '{other}'"))),
                };
            }
            "true_x" | "sigma" | "h_min" => {
                let v: f64 = num(key, value)?;
                let CostSpec::Sensor { true_x, sigma, h_min } = &mut self.costs else {
                    return Err(Error::Config(format!("{key} applies to sensor costs")));
                };
                *match key {
                    "true_x" => true_x,
                    "sigma" => sigma,
                    _ => h_min,
                } = v;
            }
            "rho" | "k2" | "mu" => {
                let v: f64 = num(key, value)?;
                match (&mut self.costs, key) {
                    (CostSpec::Quadratic { rho, .. } | CostSpec::Piecewise { rho, .. }, "rho") => *rho = v,
                    (CostSpec::Quadratic { k2, .. } | CostSpec::Piecewise { k2, .. }, "k2") => *k2 = v,
                    (CostSpec::Piecewise { mu, .. }, "mu") => *mu = v,
                    _ => return Err(Error::Config(format!("{key} does not apply to the selected costs"))),
                }
            }
            "k1" => self.k1 = num(key, value)?,
            "rounds" => self.rounds = num(key, value)?,
            "tail" => self.tail = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "variant" => self.variant = value.parse()?,
            "step_offset" => {
                self.step_offset = if value == "auto" { StepOffset::Auto } else { StepOffset::Fixed(num(key, value)?) }
            }
            "init_range" => self.init_range = num(key, value)?,
            "force" => self.force = num(key, value)?,
            "exhaustive_limit" => self.exhaustive_limit = num(key, value)?,
            "placement_attempts" => self.placement_attempts = num(key, value)?,
            "beta" => self.beta = if value == "auto" { None } else { Some(num(key, value)?) },
            "reduced_budget" => self.reduced_budget = num(key, value)?,
            "burn_in" => self.burn_in = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    fn synthetic_parts(&self) -> (f64, f64, f64) {
        match self.costs {
            CostSpec::Quadratic { rho, k2 } => (rho, k2, 0.5),
            CostSpec::Piecewise { rho, k2, mu } => (rho, k2, mu),
            CostSpec::Sensor { .. } => (1.0, 10.0, 0.5),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.rounds == 0 {
            return bad("rounds must be positive".into());
        }
        if self.tail < 2 {
            return bad("tail must be at least 2 rounds".into());
        }
        if !(self.k1 > 0.0 && self.k1.is_finite()) {
            return bad(format!("k1 {} must be positive", self.k1));
        }
        if !(self.cap > 0.0) {
            return bad(format!("cap {} must be positive", self.cap));
        }
        if !(self.init_range >= 0.0 && self.init_range <= self.k1) {
            return bad(format!("init_range {} must lie in [0, k1]", self.init_range));
        }
        if matches!(self.f, FChoice::Auto)
            && matches!(self.graph, GraphSource::Generate { robustness: None, .. })
        {
            return bad("f = auto needs an explicit robustness for generated graphs".into());
        }
        if let Some(b) = self.beta {
            if !(b > 0.0) {
                return bad(format!("beta {b} must be positive"));
            }
        }
        Ok(())
    }

    /// Canonical `key = value` text; [`RunConfig::parse`] reads it back unchanged.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: &dyn fmt::Display| {
            let _ = writeln!(out, "{k} = {v}");
        };
        match &self.graph {
            GraphSource::Generate { n, robustness } => {
                put("n", n);
                match robustness {
                    Some(r) => put("robustness", r),
                    None => put("robustness", &"auto"),
                }
            }
            GraphSource::Load(path) => put("graph_file", &path.display()),
        }
        match self.f {
            FChoice::Auto => put("f", &"auto"),
            FChoice::Fixed(f) => put("f", &f),
        }
        put("adversaries", &self.adversaries);
        put("strategy", &self.strategy);
        put("cap", &self.cap);
        match self.costs {
            CostSpec::Sensor { true_x, sigma, h_min } => {
                put("costs", &"sensor");
                put("true_x", &true_x);
                put("sigma", &sigma);
                put("h_min", &h_min);
            }
            CostSpec::Quadratic { rho, k2 } => {
                put("costs", &"quadratic");
                put("rho", &rho);
                put("k2", &k2);
            }
            CostSpec::Piecewise { rho, k2, mu } => {
                put("costs", &"piecewise");
                put("rho", &rho);
                put("k2", &k2);
                put("mu", &mu);
            }
        }
        put("k1", &self.k1);
        put("rounds", &self.rounds);
        put("tail", &self.tail);
        put("seed", &self.seed);
        put("variant", &self.variant);
        match self.step_offset {
            StepOffset::Auto => put("step_offset", &"auto"),
            StepOffset::Fixed(o) => put("step_offset", &o),
        }
        put("init_range", &self.init_range);
        put("force", &self.force);
        put("exhaustive_limit", &self.exhaustive_limit);
        put("placement_attempts", &self.placement_attempts);
        match self.beta {
            Some(b) => put("beta", &b),
            None => put("beta", &"auto"),
        }
        put("reduced_budget", &self.reduced_budget);
        put("burn_in", &self.burn_in);
        out
    }
}
