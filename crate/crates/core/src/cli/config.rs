//! Run configuration: a TOML file with `[model]`, `[domains]`, `[grid]`,
//! `[prior]`, `[oracle]`, `[output]` and `[regime_map]` tables plus a
//! top-level `checks` list.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::applications::{
    crra_model, linear_case_model, quadratic_cs_model, separable_model, CrraParams, Polynomial,
    SeparableParams,
};
use crate::conditions::{GridSpec, DEFAULT_ACTION_POINTS, DEFAULT_STATE_POINTS};
use crate::error::{Error, Result};
use crate::model::{Interval, Posterior, StateActionModel};
use crate::oracle::{DEFAULT_QUAD_POINTS, DEFAULT_SIMPLEX_RESOLUTION, MIN_LINE_RESOLUTION};

pub const DEFAULT_PI_GRID: usize = 9;
pub const DEFAULT_LINE_RESOLUTION: usize = 201;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelConfig {
    Crra { gamma: f64, rho: f64, delta: f64, kappa: f64 },
    QuadraticCs { b: f64 },
    Separable(SeparableParams),
    LinearCase { sender: Polynomial },
}

impl ModelConfig {
    pub fn family(&self) -> &'static str {
        match self {
            ModelConfig::Crra { .. } => "crra",
            ModelConfig::QuadraticCs { .. } => "quadratic_cs",
            ModelConfig::Separable(_) => "separable",
            ModelConfig::LinearCase { .. } => "linear_case",
        }
    }

    fn default_states(&self) -> (f64, f64) {
        match self {
            ModelConfig::Crra { .. } | ModelConfig::Separable(_) => (1.0, 2.0),
            ModelConfig::QuadraticCs { .. } | ModelConfig::LinearCase { .. } => (0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainsConfig {
    pub states: Option<(f64, f64)>,
    pub actions: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub states: usize,
    pub actions: usize,
    /// Action range of the grid; defaults to a band around the best responses.
    pub action_range: Option<(f64, f64)>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { states: DEFAULT_STATE_POINTS, actions: DEFAULT_ACTION_POINTS, action_range: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    pub support: Vec<f64>,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Weak,
    Derivable,
    Derivative,
    #[serde(alias = "suboptimality")]
    Subopt,
    LinearReceiver,
    LinearCase,
    Separable,
    Benchmark,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Weak => "weak",
            CheckName::Derivable => "derivable",
            CheckName::Derivative => "derivative",
            CheckName::Subopt => "subopt",
            CheckName::LinearReceiver => "linear_receiver",
            CheckName::LinearCase => "linear_case",
            CheckName::Separable => "separable",
            CheckName::Benchmark => "benchmark",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub enabled: bool,
    /// Number of interior prior weights `k/(pi_grid + 1)` in the pair scan.
    pub pi_grid: usize,
    /// Posterior samples on the two-state line.
    pub line_resolution: usize,
    /// Points per edge of the three-state simplex.
    pub simplex_resolution: usize,
    pub quad_points: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            pi_grid: DEFAULT_PI_GRID,
            line_resolution: DEFAULT_LINE_RESOLUTION,
            simplex_resolution: DEFAULT_SIMPLEX_RESOLUTION,
            quad_points: DEFAULT_QUAD_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Svg,
    JsonLines,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into(), formats: vec![Format::Csv, Format::Svg, Format::JsonLines] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegimeMapConfig {
    pub gamma: (f64, f64),
    pub rho: (f64, f64),
    pub resolution: usize,
    /// Lattice points within this distance of 1 are excluded.
    pub band: f64,
    /// Cross-validate every n-th non-excluded lattice point.
    pub validate_every: usize,
    pub delta: f64,
    pub kappa: f64,
    pub states: (f64, f64),
    /// Worker threads; 0 uses the available parallelism.
    pub threads: usize,
}

impl Default for RegimeMapConfig {
    fn default() -> Self {
        Self {
            gamma: (0.0, 2.5),
            rho: (0.0, 2.5),
            resolution: 26,
            band: 0.02,
            validate_every: 4,
            delta: 0.5,
            kappa: 0.5,
            states: (1.0, 2.0),
            threads: 0,
        }
    }
}

impl RegimeMapConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("gamma", self.gamma), ("rho", self.rho)] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(Error::Config(format!("regime_map.{name} range [{lo}, {hi}] must satisfy 0 <= lo <= hi")));
            }
            if lo <= 1.0 && 1.0 <= hi && !(self.band > 0.0) {
                return Err(Error::Config(format!(
                    "regime_map.{name} range [{lo}, {hi}] contains 1; set a positive band to exclude it"
                )));
            }
        }
        if !(self.band >= 0.0 && self.band < 1.0) {
            return Err(Error::Config(format!("regime_map.band = {} must lie in [0, 1)", self.band)));
        }
        if self.resolution == 0 {
            return Err(Error::Config("regime_map.resolution must be positive".into()));
        }
        if self.validate_every == 0 {
            return Err(Error::Config("regime_map.validate_every must be positive".into()));
        }
        let (lo, hi) = self.states;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::Config(format!("regime_map.states ({lo}, {hi}) must be positive and increasing")));
        }
        // δ and κ are checked through a representative admissible point
        CrraParams::new(0.5, 0.5, self.delta, self.kappa).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Lattice coordinates along one axis.
    pub fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![range.0];
        }
        (0..n).map(|i| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64).collect()
    }

    pub fn excluded(&self, gamma: f64, rho: f64) -> bool {
        (gamma - 1.0).abs() <= self.band || (rho - 1.0).abs() <= self.band
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub checks: Vec<CheckName>,
    pub model: ModelConfig,
    #[serde(default)]
    pub domains: DomainsConfig,
    #[serde(default)]
    pub grid: GridConfig,
    pub prior: Option<PriorConfig>,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub regime_map: RegimeMapConfig,
    /// Seed for randomized subsampling.
    pub seed: Option<u64>,
}

/// Configuration for `regime-map` when no file is given.
pub fn regime_only_config() -> RunConfig {
    RunConfig {
        checks: Vec::new(),
        model: ModelConfig::Crra { gamma: 0.5, rho: 0.5, delta: 0.5, kappa: 0.5 },
        domains: DomainsConfig::default(),
        grid: GridConfig::default(),
        prior: None,
        oracle: OracleConfig::default(),
        output: OutputConfig::default(),
        regime_map: RegimeMapConfig::default(),
        seed: None,
    }
}

fn interval(name: &str, pair: (f64, f64)) -> Result<Interval> {
    Interval::new(pair.0, pair.1).map_err(|e| Error::Config(format!("{name}: {e}")))
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Canonical JSON of everything that affects results; the output table
    /// is left out so that the same experiment hashes the same wherever it
    /// is written.
    pub fn canonical_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output");
        }
        v
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().to_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn state_domain(&self) -> Result<Interval> {
        interval("domains.states", self.domains.states.unwrap_or_else(|| self.model.default_states()))
    }

    pub fn build_model(&self) -> Result<StateActionModel> {
        let states = self.state_domain()?;
        let actions = self.domains.actions.map(|a| interval("domains.actions", a)).transpose()?;
        let model = match &self.model {
            ModelConfig::Crra { gamma, rho, delta, kappa } => {
                crra_model(CrraParams::new(*gamma, *rho, *delta, *kappa)?, states, actions)
            }
            ModelConfig::QuadraticCs { b } => quadratic_cs_model(*b, states, actions),
            ModelConfig::Separable(p) => separable_model(*p, states, actions),
            ModelConfig::LinearCase { sender } => {
                let unit = (0.0, 1.0);
                if self.domains.states.is_some_and(|s| s != unit) || self.domains.actions.is_some_and(|a| a != unit) {
                    return Err(Error::Config("linear_case domains are fixed to [0, 1]".into()));
                }
                linear_case_model(sender.clone())
            }
        };
        model.map_err(config_err)
    }

    pub fn prior(&self) -> Result<Posterior> {
        let post = match &self.prior {
            Some(p) => {
                if p.support.len() != p.probabilities.len() {
                    return Err(Error::Config("prior.support and prior.probabilities differ in length".into()));
                }
                Posterior::new(p.support.clone(), p.probabilities.clone()).map_err(config_err)?
            }
            None => {
                let d = self.state_domain()?;
                Posterior::binary(d.lo, d.hi, 0.5)?
            }
        };
        let d = self.state_domain()?;
        if let Some(s) = post.support().iter().find(|s| !d.contains(**s)) {
            return Err(Error::Config(format!("prior state {s} lies outside the state domain")));
        }
        Ok(post)
    }

    /// Condition grid: `grid.states` evenly spaced states plus the prior
    /// support, and actions from `grid.action_range` or around the best
    /// responses.
    pub fn build_grid(&self, model: &StateActionModel) -> Result<GridSpec> {
        if self.grid.states < 2 || self.grid.actions < 2 {
            return Err(Error::Config("grid needs at least 2 states and 2 actions".into()));
        }
        let base = match self.grid.action_range {
            Some(r) => GridSpec::uniform(
                model.state_domain(),
                interval("grid.action_range", r)?,
                self.grid.states,
                self.grid.actions,
            )?,
            None => GridSpec::auto(model, self.grid.states, self.grid.actions)?,
        };
        let mut states = base.state_points().to_vec();
        states.extend_from_slice(self.prior()?.support());
        states.sort_by(f64::total_cmp);
        states.dedup();
        GridSpec::new(states, base.action_points().to_vec())
    }

    /// Structural validation that runs before any computation.
    pub fn validate_for_check(&self) -> Result<()> {
        if self.checks.is_empty() {
            return Err(Error::Config("checks list is empty".into()));
        }
        for c in &self.checks {
            let ok = match c {
                CheckName::LinearCase => matches!(self.model, ModelConfig::LinearCase { .. }),
                CheckName::Separable | CheckName::Benchmark => matches!(self.model, ModelConfig::Separable(_)),
                _ => true,
            };
            if !ok {
                return Err(Error::Config(format!(
                    "check '{}' does not apply to model family '{}'",
                    c.as_str(),
                    self.model.family()
                )));
            }
        }
        self.validate_common()
    }

    pub fn validate_for_oracle(&self) -> Result<()> {
        if !self.oracle.enabled {
            return Err(Error::Config("oracle.enabled is false".into()));
        }
        let o = &self.oracle;
        if o.pi_grid == 0 {
            return Err(Error::Config("oracle.pi_grid must be positive".into()));
        }
        if o.line_resolution < MIN_LINE_RESOLUTION {
            return Err(Error::Config(format!("oracle.line_resolution must be at least {MIN_LINE_RESOLUTION}")));
        }
        if o.simplex_resolution < 2 {
            return Err(Error::Config("oracle.simplex_resolution must be at least 2".into()));
        }
        if o.quad_points == 0 || !o.quad_points.is_multiple_of(16) {
            return Err(Error::Config("oracle.quad_points must be a positive multiple of 16".into()));
        }
        self.validate_common()
    }

    fn validate_common(&self) -> Result<()> {
        let model = self.build_model()?;
        self.prior()?;
        self.build_grid(&model)?;
        Ok(())
    }
}

/// Parses `NxM` into `(states, actions)`.
pub fn parse_grid(spec: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("--grid expects NxM with positive integers, got '{spec}'"));
    let (n, m) = spec.split_once(['x', 'X']).ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let m: usize = m.trim().parse().map_err(|_| bad())?;
    if n == 0 || m == 0 {
        return Err(bad());
    }
    Ok((n, m))
}
