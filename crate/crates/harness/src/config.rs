//! Verification config: a single JSON file. Every field has a default, so
//! `{}` is the full default battery.

use std::fs;
use std::path::Path;

use pushmatch::solver::ORACLE_MAX_STEPS;
use pushmatch::{MetricKind, Options, PhiGenerator};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::scenario::{ScenarioKind, ScenarioParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub battery: BatteryConfig,
    /// Adds the canonical, contained and disjoint hand-built scenarios.
    pub reference_scenarios: bool,
    /// Extra generated scenarios beyond the battery.
    pub scenarios: Vec<ScenarioSpec>,
    pub generators: Vec<String>,
    pub metric: String,
    pub exponents: Vec<f64>,
    pub solver: SolverConfig,
    pub oracle: OracleConfig,
    pub lower_bound: LowerBoundConfig,
    pub checks: CheckConfig,
    pub tolerances: Tolerances,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 42,
            battery: BatteryConfig::default(),
            reference_scenarios: true,
            scenarios: Vec::new(),
            generators: PhiGenerator::ALL.iter().map(|g| g.name().to_string()).collect(),
            metric: MetricKind::L2.name().to_string(),
            exponents: vec![1.0, 2.0],
            solver: SolverConfig::default(),
            oracle: OracleConfig::default(),
            lower_bound: LowerBoundConfig::default(),
            checks: CheckConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryConfig {
    pub count: usize,
    pub max_theta: usize,
    pub max_support: usize,
    pub kinds: Vec<ScenarioKind>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            count: 200,
            max_theta: 10,
            max_support: 12,
            kinds: ScenarioKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: Option<String>,
    pub kind: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: ScenarioParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = Options::default();
        SolverConfig {
            max_iters: o.max_iters,
            tol: o.tol,
            step: o.step,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> Options {
        Options {
            max_iters: self.max_iters,
            tol: self.tol,
            step: self.step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// The grid oracle runs on scenarios with at most this many range points.
    pub max_range: usize,
    /// 0 disables the φ oracle.
    pub phi_grid_steps: usize,
    /// 0 disables the Wasserstein oracle. Each grid point is an LP solve.
    pub wasserstein_grid_steps: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_range: 4,
            phi_grid_steps: 200,
            wasserstein_grid_steps: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowerBoundConfig {
    /// Number of battery scenarios (from the start) that get the check.
    pub scenarios: usize,
    pub trials: usize,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        LowerBoundConfig {
            scenarios: 20,
            trials: 50,
        }
    }
}

/// Sizes of the scenario-independent checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    pub lp_pairs: usize,
    pub lp_max_support: usize,
    pub gradient_points: usize,
    pub bayes_trials: usize,
    pub bayes_perturbations: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            lp_pairs: 100,
            lp_max_support: 8,
            gradient_points: 20,
            bayes_trials: 100,
            bayes_perturbations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// TV between the iterative pushforward and the conditional restriction.
    pub conditional_tv: f64,
    /// |objective − ν₁φ(1/ν₁) − ν₀φ(0)| for both φ solvers.
    pub phi_value: f64,
    /// How far above the predicted minimum the `tv` grid oracle may land.
    pub oracle_phi_value: f64,
    /// TV between the Wasserstein pushforward and the projection pushforward.
    pub projection_tv: f64,
    /// |W_p(pushforward, ρ_y) − predicted minimum|.
    pub wasserstein_value: f64,
    /// How far below a predicted minimum any feasible candidate may land.
    pub lower_bound_slack: f64,
    pub duality_gap: f64,
    pub slackness: f64,
    pub vertex_match: f64,
    pub gradient_rel: f64,
    pub bayes_example: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            conditional_tv: 1e-6,
            phi_value: 1e-8,
            oracle_phi_value: 5e-3,
            projection_tv: 0.0,
            wasserstein_value: 1e-9,
            lower_bound_slack: 1e-9,
            duality_gap: 1e-7,
            slackness: 1e-9,
            vertex_match: 1e-9,
            gradient_rel: 1e-4,
            bayes_example: 1e-12,
        }
    }
}

impl Tolerances {
    fn all(&self) -> [(&'static str, f64); 11] {
        [
            ("conditional_tv", self.conditional_tv),
            ("phi_value", self.phi_value),
            ("oracle_phi_value", self.oracle_phi_value),
            ("projection_tv", self.projection_tv),
            ("wasserstein_value", self.wasserstein_value),
            ("lower_bound_slack", self.lower_bound_slack),
            ("duality_gap", self.duality_gap),
            ("slackness", self.slackness),
            ("vertex_match", self.vertex_match),
            ("gradient_rel", self.gradient_rel),
            ("bayes_example", self.bayes_example),
        ]
    }
}

fn bad(msg: impl Into<String>) -> HarnessError {
    HarnessError::ConfigParse(msg.into())
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::ConfigParse(msg) => bad(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn generator_list(&self) -> Result<Vec<PhiGenerator>> {
        let mut out: Vec<PhiGenerator> = Vec::new();
        for name in &self.generators {
            let g: PhiGenerator = name.parse().map_err(|e: pushmatch::Error| bad(e.to_string()))?;
            if !out.contains(&g) {
                out.push(g);
            }
        }
        Ok(out)
    }

    pub fn metric_kind(&self) -> Result<MetricKind> {
        self.metric.parse().map_err(|e: pushmatch::Error| bad(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.generator_list()?;
        self.metric_kind()?;
        if let Some(p) = self.exponents.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
            return Err(bad(format!("exponent {p} is not a finite number >= 1")));
        }
        self.solver.options().validate().map_err(|e| bad(e.to_string()))?;
        if self.oracle.phi_grid_steps > ORACLE_MAX_STEPS || self.oracle.wasserstein_grid_steps > ORACLE_MAX_STEPS {
            return Err(bad(format!("oracle grid steps are limited to {ORACLE_MAX_STEPS}")));
        }
        if self.battery.count > 0 {
            if self.battery.kinds.is_empty() {
                return Err(bad("battery.kinds is empty"));
            }
            if self.battery.max_theta < 2 || self.battery.max_theta > 64 {
                return Err(bad("battery.max_theta must lie in 2..=64"));
            }
            if self.battery.max_support < 2 || self.battery.max_support > 64 {
                return Err(bad("battery.max_support must lie in 2..=64"));
            }
        }
        if self.checks.lp_max_support == 0 {
            return Err(bad("checks.lp_max_support must be at least 1"));
        }
        if let Some((name, v)) = self.tolerances.all().into_iter().find(|(_, v)| v.is_nan() || *v < 0.0) {
            return Err(bad(format!("tolerance {name} = {v} must be nonnegative")));
        }
        Ok(())
    }
}
