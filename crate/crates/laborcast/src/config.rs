//! Run configuration, format version 1 (TOML).
//!
//! ```toml
//! version = 1
//! catalog = "catalog.toml"   # relative to this file
//! seed = 1967                # Monte Carlo master seed
//!
//! [urtest]
//! tests = [{ label = "DF", test = "adf", deterministic = "constant", lags = 0 }]
//! [[urtest.rows]]
//! label = "dLF/LF"
//! series = "lf"
//! transform = "growth_rate"  # level | diff | growth_rate | growth_rate_diff
//!
//! [[model]]
//! name = "cpi"
//! kind = "piecewise"         # or "generalized" (needs `ue`)
//! driver = "lf"
//! response = "cpi"
//! breakpoints = [1981, 1992] # first period of each new segment
//! span = [1971, 2010]
//!
//! [coint]
//! model = "cpi"
//!
//! [[evaluation]]
//! model = "cpi"
//! smoothing = 3              # MA(k) of the prediction; omit for raw
//!
//! [forecast]
//! inflation_model = "cpi"
//! unemployment_model = "ue"
//! from = 2010
//! to = 2050
//! ```
//!
//! Every table other than `version` and `catalog` is optional. Unknown keys
//! are rejected.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use laborcast_core::cointegration::JohansenTrend;
use laborcast_core::lagmodel::{CalibrationConfig, DriverTransform, GridAxis, Objective};
use laborcast_core::unitroot::{Deterministic, TestKind};
use laborcast_core::Period;
use serde::Deserialize;

use crate::catalog::Catalog;
use crate::error::{AppError, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub catalog: PathBuf,
    #[serde(default)]
    pub seed: u64,
    pub urtest: Option<UrtestConfig>,
    #[serde(default, rename = "model")]
    pub models: Vec<ModelConfig>,
    pub coint: Option<CointConfig>,
    #[serde(default, rename = "evaluation")]
    pub evaluations: Vec<EvaluationConfig>,
    pub forecast: Option<ForecastConfig>,
    pub plotdata: Option<PlotConfig>,
    pub montecarlo: Option<MonteCarloConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UrtestConfig {
    pub tests: Vec<UrTestColumn>,
    pub rows: Vec<UrTestRow>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UrTestColumn {
    pub label: Option<String>,
    pub test: TestKind,
    pub deterministic: Deterministic,
    /// Lagged differences (ADF, DF-GLS) or bandwidth (PP); defaults by
    /// frequency, or the rule-of-thumb bandwidth for PP.
    pub lags: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesTransform {
    Level,
    Diff,
    GrowthRate,
    GrowthRateDiff,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UrTestRow {
    pub label: Option<String>,
    pub series: String,
    #[serde(default = "level")]
    pub transform: SeriesTransform,
    pub span: Option<[Period; 2]>,
}

fn level() -> SeriesTransform {
    SeriesTransform::Level
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Piecewise,
    Generalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl From<AxisConfig> for GridAxis {
    fn from(a: AxisConfig) -> Self {
        GridAxis::new(a.min, a.max, a.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedSlope {
    pub segment: usize,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default = "piecewise")]
    pub kind: ModelKind,
    pub driver: String,
    pub response: String,
    pub ue: Option<String>,
    #[serde(default = "growth")]
    pub transform: DriverTransform,
    #[serde(default)]
    pub breakpoints: Vec<Period>,
    pub span: Option<[Period; 2]>,
    pub lags: Option<[i64; 2]>,
    pub ue_lags: Option<[i64; 2]>,
    pub slope: Option<AxisConfig>,
    pub intercept: Option<AxisConfig>,
    pub ue_slope: Option<AxisConfig>,
    #[serde(default = "cumulative")]
    pub objective: Objective,
    #[serde(default = "yes")]
    pub refine: bool,
    #[serde(default)]
    pub fixed_slopes: Vec<FixedSlope>,
}

fn piecewise() -> ModelKind {
    ModelKind::Piecewise
}
fn growth() -> DriverTransform {
    DriverTransform::GrowthRate
}
fn cumulative() -> Objective {
    Objective::CumulativeRms
}
fn yes() -> bool {
    true
}

impl ModelConfig {
    pub fn calibration(&self) -> CalibrationConfig {
        let d = CalibrationConfig::default();
        let [lag_min, lag_max] = self.lags.unwrap_or([d.lag_min, d.lag_max]);
        let [ue_lag_min, ue_lag_max] = self.ue_lags.unwrap_or([d.ue_lag_min, d.ue_lag_max]);
        CalibrationConfig {
            breakpoints: self.breakpoints.clone(),
            lag_min,
            lag_max,
            slope: self.slope.map_or(d.slope, Into::into),
            intercept: self.intercept.map_or(d.intercept, Into::into),
            ue_slope: self.ue_slope.map_or(d.ue_slope, Into::into),
            ue_lag_min,
            ue_lag_max,
            refine: self.refine,
            objective: self.objective,
            driver_transform: self.transform,
            span: self.span.map(|[a, b]| (a, b)),
            fixed_slopes: self.fixed_slopes.iter().map(|f| (f.segment, f.slope)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CointConfig {
    /// Model whose residual (observed − predicted) is tested.
    pub model: String,
    #[serde(default)]
    pub adf_lags: usize,
    #[serde(default = "four")]
    pub dfgls_max_lag: usize,
    #[serde(default = "constant")]
    pub deterministic: Deterministic,
    #[serde(default = "constant_and_trend")]
    pub dfgls_deterministic: Deterministic,
    pub pp_bandwidth: Option<usize>,
    #[serde(default = "two")]
    pub johansen_max_lag: usize,
    #[serde(default = "both_trends")]
    pub johansen_trends: Vec<JohansenTrend>,
}

fn four() -> usize {
    4
}
fn two() -> usize {
    2
}
fn constant() -> Deterministic {
    Deterministic::Constant
}
fn constant_and_trend() -> Deterministic {
    Deterministic::ConstantAndTrend
}
fn both_trends() -> Vec<JohansenTrend> {
    vec![JohansenTrend::None, JohansenTrend::RConstant]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationConfig {
    pub model: String,
    /// Trailing MA window applied to the prediction.
    pub smoothing: Option<usize>,
    pub span: Option<[Period; 2]>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForecastConfig {
    pub inflation_model: String,
    pub unemployment_model: Option<String>,
    pub from: Period,
    pub to: Period,
    /// Scenario names; empty means every scenario in the catalog.
    #[serde(default)]
    pub scenarios: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotConfig {
    /// Models to emit; empty means all.
    #[serde(default)]
    pub models: Vec<String>,
    #[serde(default = "three")]
    pub smoothing: usize,
}

fn three() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    #[serde(default = "trials")]
    pub trials: usize,
    #[serde(default = "hundred")]
    pub length: usize,
    #[serde(default = "half")]
    pub ar_coefficient: f64,
    /// Lagged differences in the ADF regressions.
    #[serde(default = "one")]
    pub adf_lags: usize,
    #[serde(default = "two_hundred")]
    pub johansen_trials: usize,
    #[serde(default = "two_hundred")]
    pub johansen_length: usize,
    #[serde(default = "two")]
    pub johansen_max_lag: usize,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            trials: 500,
            length: 100,
            ar_coefficient: 0.5,
            adf_lags: 1,
            johansen_trials: 200,
            johansen_length: 200,
            johansen_max_lag: 2,
        }
    }
}

fn one() -> usize {
    1
}
fn trials() -> usize {
    500
}
fn hundred() -> usize {
    100
}
fn half() -> f64 {
    0.5
}
fn two_hundred() -> usize {
    200
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| AppError::config(format!("config: {e}")))?;
        if cfg.version != CONFIG_VERSION {
            return Err(AppError::config(format!(
                "config: unsupported version {} (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn model(&self, name: &str) -> Result<&ModelConfig> {
        self.models
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| AppError::config(format!("model `{name}` is not defined in the config")))
    }

    pub fn catalog_path(&self, config_path: &Path) -> PathBuf {
        config_path.parent().unwrap_or(Path::new(".")).join(&self.catalog)
    }

    /// Checks references between sections and against the catalog.
    pub fn validate(&self, catalog: &Catalog) -> Result<()> {
        let mut names = BTreeSet::new();
        for m in &self.models {
            if !names.insert(m.name.as_str()) {
                return Err(AppError::config(format!("model `{}` is defined twice", m.name)));
            }
            catalog.entry(&m.driver)?;
            catalog.entry(&m.response)?;
            match (m.kind, &m.ue) {
                (ModelKind::Generalized, None) => {
                    return Err(AppError::config(format!("generalized model `{}` needs `ue`", m.name)))
                }
                (ModelKind::Generalized, Some(ue)) => {
                    catalog.entry(ue)?;
                }
                (ModelKind::Piecewise, Some(_)) => {
                    return Err(AppError::config(format!("`ue` only applies to generalized models (`{}`)", m.name)))
                }
                _ => {}
            }
            for w in m.breakpoints.windows(2) {
                if w[0] >= w[1] {
                    return Err(AppError::config(format!("model `{}`: breakpoints must increase", m.name)));
                }
            }
        }
        if let Some(u) = &self.urtest {
            for r in &u.rows {
                catalog.entry(&r.series)?;
            }
        }
        if let Some(c) = &self.coint {
            self.model(&c.model)?;
            if c.johansen_max_lag == 0 {
                return Err(AppError::config("coint: johansen_max_lag must be at least 1"));
            }
        }
        for e in &self.evaluations {
            self.model(&e.model)?;
            if e.smoothing == Some(0) {
                return Err(AppError::config("evaluation: smoothing must be at least 1"));
            }
        }
        if let Some(f) = &self.forecast {
            self.model(&f.inflation_model)?;
            if let Some(u) = &f.unemployment_model {
                if self.model(u)?.kind != ModelKind::Piecewise {
                    return Err(AppError::config("forecast: the unemployment model must be piecewise"));
                }
            }
            for s in &f.scenarios {
                if !catalog.scenarios.iter().any(|c| &c.name == s) {
                    return Err(AppError::config(format!("forecast: scenario `{s}` is not in the catalog")));
                }
            }
            if f.from > f.to {
                return Err(AppError::config("forecast: `from` is after `to`"));
            }
        }
        if let Some(p) = &self.plotdata {
            for m in &p.models {
                self.model(m)?;
            }
        }
        Ok(())
    }
}
