//! Command implementations. Each command returns the files it would write;
//! [`write_outputs`] puts them on disk.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use laborcast_core::cointegration::{engle_granger_with, johansen, EngleGrangerConfig};
use laborcast_core::critical::Significance;
use laborcast_core::evaluate::{evaluate, relative_cumulative_error, Preset};
use laborcast_core::forecast::{project, project_generalized, ForecastResult};
use laborcast_core::lagmodel::{
    calibrate, calibrate_generalized, predict_generalized, predict_piecewise, CalibrationDiagnostics,
};
use laborcast_core::regress::default_bandwidth;
use laborcast_core::series::{align, cumulative, diff, growth_rate, moving_average};
use laborcast_core::unitroot::{default_lags, unit_root_test, Statistic, TestKind, UnitRootSpec};
use laborcast_core::{Period, Series};
use sha2::{Digest, Sha256};

use crate::catalog::Catalog;
use crate::config::{ModelKind, RunConfig, SeriesTransform};
use crate::error::{AppError, Result};
use crate::modelfile::{FittedModel, ModelFile};
use crate::montecarlo;
use crate::report::{fixed, num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Urtest,
    Coint,
    Calibrate,
    Evaluate,
    Forecast,
    Plotdata,
    Montecarlo,
    /// Every command whose config section is present.
    Run,
}

/// A file to be written under the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub path: String,
    pub contents: String,
}

#[derive(Debug, Clone, Default)]
pub struct SessionOptions {
    pub config: PathBuf,
    pub seed: Option<u64>,
    /// `(series id, replacement file)`.
    pub series: Vec<(String, PathBuf)>,
    /// Directory of model files to use instead of calibrating.
    pub models: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub file: ModelFile,
    /// Absent when the model was loaded from a file.
    pub diagnostics: Option<CalibrationDiagnostics>,
}

pub struct Session {
    pub config: RunConfig,
    pub catalog: Catalog,
    pub seed: u64,
    pub hash: String,
    models_dir: Option<PathBuf>,
    series: BTreeMap<String, Series>,
    fits: BTreeMap<String, Fit>,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| AppError::io(path, e))
}

fn hash_part(h: &mut Sha256, label: &str, bytes: &[u8]) {
    h.update(label.as_bytes());
    h.update((bytes.len() as u64).to_le_bytes());
    h.update(bytes);
}

impl Session {
    pub fn open(opts: &SessionOptions) -> Result<Session> {
        let config_bytes = read(&opts.config)?;
        let text = String::from_utf8(config_bytes.clone())
            .map_err(|_| AppError::config(format!("{}: not UTF-8", opts.config.display())))?;
        let config = RunConfig::parse(&text).map_err(|e| e.context(opts.config.display()))?;
        let catalog_path = config.catalog_path(&opts.config);
        let mut catalog = Catalog::load(&catalog_path)?;
        for (id, path) in &opts.series {
            catalog.set_override(id, path.clone())?;
        }
        config.validate(&catalog)?;
        let seed = opts.seed.unwrap_or(config.seed);

        // File names stay out of the hash so that moving the tree around
        // does not change it.
        let mut h = Sha256::new();
        hash_part(&mut h, "config", &config_bytes);
        hash_part(&mut h, "catalog", &read(&catalog_path)?);
        for s in &catalog.series {
            hash_part(&mut h, &format!("series:{}", s.id), &read(&catalog.series_path(&s.id)?)?);
        }
        for s in &catalog.scenarios {
            hash_part(&mut h, &format!("scenario:{}", s.name), &read(&catalog.dir.join(&s.file))?);
        }
        if let Some(dir) = &opts.models {
            for m in &config.models {
                hash_part(&mut h, &format!("model:{}", m.name), &read(&dir.join(format!("{}.toml", m.name)))?);
            }
        }
        hash_part(&mut h, "seed", &seed.to_le_bytes());
        let hash = hex::encode(h.finalize());

        let mut session = Session {
            config,
            catalog,
            seed,
            hash,
            models_dir: opts.models.clone(),
            series: BTreeMap::new(),
            fits: BTreeMap::new(),
        };
        session.check_breakpoints()?;
        Ok(session)
    }

    fn check_breakpoints(&mut self) -> Result<()> {
        for m in self.config.models.clone() {
            let r = self.series(&m.response)?;
            for b in &m.breakpoints {
                if b.frequency() != r.frequency() || *b <= r.start() || *b > r.end() {
                    return Err(AppError::config(format!(
                        "model `{}`: breakpoint {b} is outside the span of `{}` ({}..{})",
                        m.name,
                        m.response,
                        r.start(),
                        r.end()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn series(&mut self, id: &str) -> Result<Series> {
        if let Some(s) = self.series.get(id) {
            return Ok(s.clone());
        }
        let s = self.catalog.load_series(id)?;
        self.series.insert(id.to_string(), s.clone());
        Ok(s)
    }

    /// Calibrated (or loaded) model by config name.
    pub fn fit(&mut self, name: &str) -> Result<Fit> {
        if let Some(f) = self.fits.get(name) {
            return Ok(f.clone());
        }
        let mc = self.config.model(name)?.clone();
        let fit = match &self.models_dir {
            Some(dir) => {
                let file = ModelFile::load(&dir.join(format!("{name}.toml")))?;
                let kind_ok = matches!(
                    (&file.model, mc.kind),
                    (FittedModel::Piecewise(_), ModelKind::Piecewise) | (FittedModel::Generalized(_), ModelKind::Generalized)
                );
                if file.name != name || !kind_ok {
                    return Err(AppError::config(format!("model file for `{name}` does not match the config")));
                }
                Fit { file, diagnostics: None }
            }
            None => {
                let cal = mc.calibration();
                let driver = self.series(&mc.driver)?;
                let response = self.series(&mc.response)?;
                let ctx = |e: laborcast_core::Error| AppError::from(e).context(format!("calibrating `{name}`"));
                let (model, diagnostics) = match mc.kind {
                    ModelKind::Piecewise => {
                        let c = calibrate(&driver, &response, &cal).map_err(ctx)?;
                        (FittedModel::Piecewise(c.model), c.diagnostics)
                    }
                    ModelKind::Generalized => {
                        let ue = self.series(mc.ue.as_deref().expect("validated"))?;
                        let c = calibrate_generalized(&driver, &ue, &response, &cal).map_err(ctx)?;
                        (FittedModel::Generalized(c.model), c.diagnostics)
                    }
                };
                Fit { file: ModelFile { name: name.to_string(), model }, diagnostics: Some(diagnostics) }
            }
        };
        self.fits.insert(name.to_string(), fit.clone());
        Ok(fit)
    }

    /// Observed response and model prediction.
    pub fn observed_and_predicted(&mut self, name: &str) -> Result<(Series, Series)> {
        let fit = self.fit(name)?;
        let ctx = |e: laborcast_core::Error| AppError::from(e).context(format!("predicting `{name}`"));
        let pred = match &fit.file.model {
            FittedModel::Piecewise(m) => predict_piecewise(m, &self.series(&m.driver_id)?).map_err(ctx)?,
            FittedModel::Generalized(m) => {
                predict_generalized(m, &self.series(&m.lf_id)?, &self.series(&m.ue_id)?).map_err(ctx)?
            }
        };
        let obs = self.series(fit.file.model.response_id())?;
        Ok((obs, pred))
    }

    /// Observed and predicted over the model's span, trimmed to the periods
    /// where both are present.
    fn overlap(&mut self, name: &str) -> Result<(Series, Series)> {
        let (obs, pred) = self.observed_and_predicted(name)?;
        let span = self.config.model(name)?.span;
        let pairs = align(&obs, &pred)?;
        let inside = |p: &Period| span.is_none_or(|[a, b]| *p >= a && *p <= b);
        let periods: Vec<Period> = pairs.iter().map(|p| p.period).filter(inside).collect();
        let (Some(&from), Some(&to)) = (periods.first(), periods.last()) else {
            return Err(AppError::data(format!("model `{name}`: no overlap between observed and predicted")));
        };
        Ok((obs.window(from, to)?, pred.window(from, to)?))
    }

    pub fn execute(&mut self, command: Command) -> Result<Vec<Output>> {
        let need = |present: bool, section: &str| {
            if present {
                Ok(())
            } else {
                Err(AppError::config(format!("the config has no {section} section")))
            }
        };
        match command {
            Command::Urtest => {
                need(self.config.urtest.is_some(), "[urtest]")?;
                self.urtest()
            }
            Command::Coint => {
                need(self.config.coint.is_some(), "[coint]")?;
                self.coint()
            }
            Command::Calibrate => {
                need(!self.config.models.is_empty(), "[[model]]")?;
                self.calibrate()
            }
            Command::Evaluate => {
                need(!self.config.evaluations.is_empty(), "[[evaluation]]")?;
                self.evaluate()
            }
            Command::Forecast => {
                need(self.config.forecast.is_some(), "[forecast]")?;
                self.forecast()
            }
            Command::Plotdata => {
                need(!self.config.models.is_empty(), "[[model]]")?;
                self.plotdata()
            }
            Command::Montecarlo => {
                need(self.config.montecarlo.is_some(), "[montecarlo]")?;
                self.montecarlo()
            }
            Command::Run => {
                let mut out = Vec::new();
                let steps = [
                    (self.config.urtest.is_some(), Command::Urtest),
                    (!self.config.models.is_empty(), Command::Calibrate),
                    (!self.config.evaluations.is_empty(), Command::Evaluate),
                    (self.config.coint.is_some(), Command::Coint),
                    (self.config.forecast.is_some(), Command::Forecast),
                    (!self.config.models.is_empty(), Command::Plotdata),
                    (self.config.montecarlo.is_some(), Command::Montecarlo),
                ];
                for (present, c) in steps {
                    if present {
                        out.extend(self.execute(c)?);
                    }
                }
                Ok(out)
            }
        }
    }

    fn csv(&self, path: &str, t: &Table) -> Output {
        Output { path: path.to_string(), contents: t.to_csv(&self.hash) }
    }

    fn text(&self, path: &str, body: String) -> Output {
        Output { path: path.to_string(), contents: format!("# config-hash: {}\n{body}", self.hash) }
    }

    fn urtest(&mut self) -> Result<Vec<Output>> {
        let cfg = self.config.urtest.clone().expect("checked");
        let mut long = Table::new([
            "row", "series", "transform", "start", "end", "test", "deterministic", "lags", "nobs", "statistic", "value",
            "crit_1", "crit_5", "crit_10", "reject_1", "reject_5",
        ]);
        let mut header = vec!["series".to_string()];
        for c in &cfg.tests {
            let label = c.label.clone().unwrap_or_else(|| c.test.label().to_string());
            match c.test {
                TestKind::Pp => {
                    header.push(format!("{label} z(rho)"));
                    header.push(format!("{label} z(t)"));
                }
                _ => header.push(match c.lags {
                    Some(l) => format!("{label} (lag {l})"),
                    None => label,
                }),
            }
        }
        let mut wide = Table::new(header);
        for row in &cfg.rows {
            let raw = self.series(&row.series)?;
            let label = row.label.clone().unwrap_or_else(|| row.series.clone());
            let ctx = |e: laborcast_core::Error| AppError::from(e).context(format!("urtest row `{label}`"));
            let mut s = match row.transform {
                SeriesTransform::Level => raw,
                SeriesTransform::Diff => diff(&raw).map_err(ctx)?,
                SeriesTransform::GrowthRate => growth_rate(&raw).map_err(ctx)?,
                SeriesTransform::GrowthRateDiff => diff(&growth_rate(&raw).map_err(ctx)?).map_err(ctx)?,
            };
            if let Some([a, b]) = row.span {
                s = s.window(a, b).map_err(ctx)?;
            }
            let (start, x) = s.contiguous().map_err(ctx)?;
            let end = start.offset(x.len() as i64 - 1);
            let mut cells = vec![label.clone()];
            for c in &cfg.tests {
                let lags = c.lags.unwrap_or(match c.test {
                    TestKind::Pp => default_bandwidth(x.len().saturating_sub(1)),
                    _ => default_lags(s.frequency()),
                });
                let spec = UnitRootSpec { test: c.test, deterministic: c.deterministic, lags };
                let r = unit_root_test(&s, &spec).map_err(ctx)?;
                let mut stats: Vec<(&str, Statistic)> = Vec::new();
                if let Some(z) = r.z_rho {
                    stats.push(("z_rho", z));
                }
                stats.push((if c.test == TestKind::Pp { "z_t" } else { "tau" }, r.statistic));
                for (name, st) in stats {
                    long.push(vec![
                        label.clone(),
                        row.series.clone(),
                        transform_label(row.transform).into(),
                        start.to_string(),
                        end.to_string(),
                        c.test.label().into(),
                        deterministic_label(c.deterministic).into(),
                        lags.to_string(),
                        r.nobs.to_string(),
                        name.into(),
                        num(st.value),
                        num(st.critical.one),
                        num(st.critical.five),
                        num(st.critical.ten),
                        st.rejects(Significance::One).to_string(),
                        st.rejects(Significance::Five).to_string(),
                    ]);
                    cells.push(cell(&st));
                }
            }
            wide.push(cells);
        }
        let title = "Unit-root tests. Cell: statistic (1% critical value); * marks rejection of a unit root at 1%.";
        Ok(vec![
            self.csv("urtest.csv", &long),
            Output { path: "urtest.txt".into(), contents: wide.to_text(title, &self.hash) },
        ])
    }

    fn calibrate(&mut self) -> Result<Vec<Output>> {
        let mut out = Vec::new();
        let mut t = Table::new([
            "model", "kind", "segment", "start", "end", "lag", "ue_lag", "slope", "ue_slope", "intercept", "nobs",
            "grid_objective", "objective", "cumulative_rms", "annual_rms",
        ]);
        let mut text = Table::new(["model", "segment", "span", "lag", "slope", "ue lag", "ue slope", "intercept", "objective"]);
        for mc in self.config.models.clone() {
            let fit = self.fit(&mc.name)?;
            out.push(Output { path: format!("models/{}.toml", mc.name), contents: fit.file.to_toml()? });
            let diag = fit.diagnostics.as_ref().map(|d| &d.segments);
            let rows: Vec<SegmentRow> = match &fit.file.model {
                FittedModel::Piecewise(m) => {
                    m.segments.iter().map(|s| (s.start, s.end, s.lag, None, s.slope, None, s.intercept)).collect()
                }
                FittedModel::Generalized(m) => m
                    .segments
                    .iter()
                    .map(|s| (s.start, s.end, s.lag_lf, Some(s.lag_ue), s.slope_lf, Some(s.slope_ue), s.intercept))
                    .collect(),
            };
            for (i, (start, end, lag, ue_lag, slope, ue_slope, icpt)) in rows.into_iter().enumerate() {
                let d = diag.and_then(|d| d.get(i));
                t.push(vec![
                    mc.name.clone(),
                    kind_label(mc.kind).into(),
                    i.to_string(),
                    start.to_string(),
                    end.map(|e| e.to_string()).unwrap_or_default(),
                    lag.to_string(),
                    ue_lag.map(|l| l.to_string()).unwrap_or_default(),
                    num(slope),
                    num(ue_slope),
                    num(icpt),
                    d.map(|d| d.nobs.to_string()).unwrap_or_default(),
                    num(d.map(|d| d.grid_objective)),
                    num(d.map(|d| d.objective)),
                    num(d.map(|d| d.cumulative_rms)),
                    num(d.map(|d| d.annual_rms)),
                ]);
                let span = match (d, end) {
                    (Some(d), _) => format!("{}-{}", d.start, d.end),
                    (None, Some(e)) => format!("{start}-{e}"),
                    (None, None) => format!("{start}-"),
                };
                text.push(vec![
                    mc.name.clone(),
                    i.to_string(),
                    span,
                    lag.to_string(),
                    fixed(slope, 3),
                    ue_lag.map(|l| l.to_string()).unwrap_or_default(),
                    ue_slope.map(|v| fixed(v, 3)).unwrap_or_default(),
                    fixed(icpt, 4),
                    d.map(|d| format!("{:.3e}", d.objective)).unwrap_or_default(),
                ]);
            }
        }
        out.push(self.csv("calibration.csv", &t));
        out.push(Output { path: "calibration.txt".into(), contents: text.to_text("Calibrated models", &self.hash) });
        Ok(out)
    }

    /// Evaluation reports in config order.
    pub fn evaluation_reports(&mut self) -> Result<Vec<(String, Preset, laborcast_core::evaluate::EvaluationReport)>> {
        let mut out = Vec::new();
        for e in self.config.evaluations.clone() {
            let (obs, pred) = self.observed_and_predicted(&e.model)?;
            let preset = match e.smoothing {
                None | Some(1) => Preset::Annual,
                Some(k) => Preset::SmoothedPrediction(k),
            };
            let span = e.span.or(self.config.model(&e.model)?.span).map(|[a, b]| (a, b));
            let r = evaluate(&obs, &pred, span, preset)
                .map_err(|err| AppError::from(err).context(format!("evaluating `{}`", e.model)))?;
            out.push((e.model.clone(), preset, r));
        }
        Ok(out)
    }

    fn evaluate(&mut self) -> Result<Vec<Output>> {
        let mut t = Table::new([
            "model", "preset", "start", "end", "nobs", "r2_annual", "r2_cumulative", "rmsfe", "naive_rmsfe",
            "final_relative_cumulative_error",
        ]);
        let mut text = Table::new(["model", "preset", "span", "n", "R2 annual", "R2 cumulative", "RMSFE", "naive RMSFE"]);
        for (model, preset, r) in self.evaluation_reports()? {
            let last = r.relative_cumulative_error.values().iter().rev().find_map(|v| *v);
            t.push(vec![
                model.clone(),
                preset_label(preset),
                r.span.0.to_string(),
                r.span.1.to_string(),
                r.nobs.to_string(),
                num(r.r2_annual),
                num(r.r2_cumulative),
                num(r.rmsfe),
                num(r.naive_rmsfe),
                num(last),
            ]);
            text.push(vec![
                model,
                preset_label(preset),
                format!("{}-{}", r.span.0, r.span.1),
                r.nobs.to_string(),
                fixed(r.r2_annual, 3),
                fixed(r.r2_cumulative, 4),
                fixed(r.rmsfe, 4),
                fixed(r.naive_rmsfe, 4),
            ]);
        }
        Ok(vec![self.csv("evaluation.csv", &t), Output { path: "evaluation.txt".into(), contents: text.to_text("Model evaluation", &self.hash) }])
    }

    /// Residual (observed − predicted) of the cointegration model.
    pub fn coint_residual(&mut self) -> Result<Series> {
        let name = self.config.coint.as_ref().expect("checked").model.clone();
        let (obs, pred) = self.overlap(&name)?;
        let v: Vec<f64> = align(&obs, &pred)?.iter().map(|p| p.a - p.b).collect();
        Ok(Series::from_values(format!("{name}_residual"), obs.start(), &v)?)
    }

    fn coint(&mut self) -> Result<Vec<Output>> {
        let cfg = self.config.coint.clone().expect("checked");
        let residual = self.coint_residual()?;
        let eg = engle_granger_with(
            &residual,
            &EngleGrangerConfig {
                adf_lags: cfg.adf_lags,
                dfgls_max_lag: cfg.dfgls_max_lag,
                deterministic: cfg.deterministic,
                dfgls_deterministic: cfg.dfgls_deterministic,
                pp_bandwidth: cfg.pp_bandwidth,
            },
        )?;
        let mut t3 = Table::new(["test", "lags", "nobs", "statistic", "value", "crit_1", "crit_5", "crit_10", "reject_1"]);
        let mut t3_text = Table::new(["test", "lag", "statistic", "1% critical"]);
        for r in &eg.residual_tests {
            let mut stats = Vec::new();
            if let Some(z) = r.z_rho {
                stats.push(("z_rho", z));
            }
            stats.push((if r.spec.test == TestKind::Pp { "z_t" } else { "tau" }, r.statistic));
            for (name, st) in stats {
                t3.push(vec![
                    r.spec.test.label().into(),
                    r.spec.lags.to_string(),
                    r.nobs.to_string(),
                    name.into(),
                    num(st.value),
                    num(st.critical.one),
                    num(st.critical.five),
                    num(st.critical.ten),
                    st.rejects(Significance::One).to_string(),
                ]);
                let test = match (r.spec.test, r.spec.lags) {
                    (TestKind::Adf, 0) => "DF".to_string(),
                    (k, _) => k.label().to_string(),
                };
                t3_text.push(vec![
                    test,
                    r.spec.lags.to_string(),
                    format!("{:.3}{}", st.value, if st.rejects(Significance::One) { "*" } else { "" }),
                    fixed(st.critical.one, 2),
                ]);
            }
        }

        let name = cfg.model.clone();
        let (obs, pred) = self.overlap(&name)?;
        let mut t4 = Table::new(["trend", "max_lag", "nobs", "rank", "eigenvalue", "trace", "crit_5", "selected_rank"]);
        let mut t4_text = Table::new(["trend", "rank", "eigenvalue", "trace", "5% critical", "selected"]);
        let mut notes = Vec::new();
        for trend in &cfg.johansen_trends {
            let j = johansen(&[obs.clone(), pred.clone()], cfg.johansen_max_lag, *trend)
                .map_err(|e| AppError::from(e).context("Johansen test"))?;
            for row in &j.rows {
                t4.push(vec![
                    trend.label().into(),
                    j.max_lag.to_string(),
                    j.nobs.to_string(),
                    row.rank.to_string(),
                    num(row.eigenvalue),
                    num(row.trace_stat),
                    num(row.critical_5pct),
                    j.selected_rank.to_string(),
                ]);
                t4_text.push(vec![
                    trend.label().into(),
                    row.rank.to_string(),
                    row.eigenvalue.map(|v| fixed(v, 4)).unwrap_or_default(),
                    row.trace_stat.map(|v| fixed(v, 3)).unwrap_or_default(),
                    row.critical_5pct.map(|v| fixed(v, 2)).unwrap_or_default(),
                    if row.rank == j.selected_rank { "*".into() } else { String::new() },
                ]);
            }
            for n in &j.notes {
                if !notes.contains(n) {
                    notes.push(*n);
                }
            }
        }
        let mut text = format!(
            "Residual of `{name}`, {}-{} ({} observations)\n\n",
            residual.start(),
            residual.end(),
            residual.len()
        );
        text.push_str(&body(&t3_text.to_text("Unit-root tests of the residual (* rejects at 1%)", "")));
        text.push('\n');
        text.push_str(&body(&t4_text.to_text(
            &format!("Johansen trace test on observed and predicted `{name}`, max lag {}", cfg.johansen_max_lag),
            "",
        )));
        text.push_str(&format!("\ncointegrated at 1% (ADF and PP z(t)): {}\n", eg.cointegrated_at_1pct));
        for n in notes {
            text.push_str(&format!("note: {n}\n"));
        }
        Ok(vec![
            self.csv("coint_residual.csv", &t3),
            self.csv("coint_johansen.csv", &t4),
            self.text("coint.txt", text),
        ])
    }

    /// One result per scenario, in config (or catalog) order.
    pub fn forecasts(&mut self) -> Result<Vec<ForecastResult>> {
        let cfg = self.config.forecast.clone().expect("checked");
        let names: Vec<String> = if cfg.scenarios.is_empty() {
            self.catalog.scenarios.iter().map(|s| s.name.clone()).collect()
        } else {
            cfg.scenarios.clone()
        };
        let scenarios = self.catalog.load_scenarios()?;
        let infl = self.fit(&cfg.inflation_model)?.file.model;
        let ue = match &cfg.unemployment_model {
            Some(u) => Some(self.fit(u)?.file.model),
            None => None,
        };
        let ue = ue.as_ref().map(|m| m.as_piecewise().expect("validated piecewise"));
        let mut out = Vec::new();
        for name in names {
            let s = scenarios.iter().find(|s| s.name == name).expect("validated");
            let r = match &infl {
                FittedModel::Piecewise(m) => project(m, ue, s, cfg.from, cfg.to),
                FittedModel::Generalized(g) => {
                    let ue = ue.ok_or_else(|| {
                        AppError::config("forecast: a generalized inflation model needs `unemployment_model`")
                    })?;
                    project_generalized(g, ue, s, cfg.from, cfg.to)
                }
            }
            .map_err(|e| AppError::from(e).context(format!("scenario `{name}`")))?;
            out.push(r);
        }
        Ok(out)
    }

    fn forecast_table(&mut self) -> Result<(Table, Table)> {
        let mut t = Table::new(["scenario", "variable", "period", "value"]);
        let mut text = Table::new(["scenario", "variable", "min", "max", "mean"]);
        for r in self.forecasts()? {
            let mut paths = vec![(r.inflation_model.clone(), r.inflation.clone())];
            if let (Some(id), Some(u)) = (&r.unemployment_model, &r.unemployment) {
                paths.push((id.clone(), u.clone()));
            }
            for (var, s) in paths {
                for (p, v) in s.iter() {
                    t.push(vec![r.scenario.clone(), var.clone(), p.to_string(), num(v)]);
                }
                let v: Vec<f64> = s.values().iter().flatten().copied().collect();
                let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
                let mean = v.iter().sum::<f64>() / v.len().max(1) as f64;
                text.push(vec![r.scenario.clone(), var, fixed(lo, 4), fixed(hi, 4), fixed(mean, 4)]);
            }
        }
        Ok((t, text))
    }

    fn forecast(&mut self) -> Result<Vec<Output>> {
        let cfg = self.config.forecast.clone().expect("checked");
        let (t, text) = self.forecast_table()?;
        Ok(vec![
            self.csv("forecast.csv", &t),
            Output {
                path: "forecast.txt".into(),
                contents: text.to_text(&format!("Scenario projections {}-{}", cfg.from, cfg.to), &self.hash),
            },
        ])
    }

    fn plotdata(&mut self) -> Result<Vec<Output>> {
        let (names, k) = match &self.config.plotdata {
            Some(p) if !p.models.is_empty() => (p.models.clone(), p.smoothing),
            Some(p) => (self.config.models.iter().map(|m| m.name.clone()).collect(), p.smoothing),
            None => (self.config.models.iter().map(|m| m.name.clone()).collect(), 3),
        };
        let mut out = Vec::new();
        for name in names {
            let (obs, pred) = self.overlap(&name)?;
            let base = obs.start();
            let mut t = Table::new(["period", "series", "value"]);
            let mut add = |label: &str, s: &Series| {
                for (p, v) in s.iter() {
                    t.push(vec![p.to_string(), label.to_string(), num(v)]);
                }
            };
            add("observed", &obs);
            add("predicted", &pred);
            add("observed_cumulative", &cumulative(&obs, base)?);
            add("predicted_cumulative", &cumulative(&pred, base)?);
            if obs.len() >= k {
                add(&format!("observed_ma{k}"), &moving_average(&obs, k)?);
                add(&format!("predicted_ma{k}"), &moving_average(&pred, k)?);
            }
            add("relative_cumulative_error", &relative_cumulative_error(&obs, &pred, base)?);
            out.push(self.csv(&format!("plot_{name}.csv"), &t));
        }
        if self.config.forecast.is_some() {
            let (t, _) = self.forecast_table()?;
            out.push(self.csv("plot_forecast.csv", &t));
        }
        Ok(out)
    }

    fn montecarlo(&mut self) -> Result<Vec<Output>> {
        let cfg = self.config.montecarlo.clone().expect("checked");
        let adf = montecarlo::adf_size_power(self.seed, &cfg)?;
        let j = montecarlo::johansen_rank_rates(self.seed, &cfg)?;
        let eg = montecarlo::residual_battery_on_white_noise(self.seed, &cfg)?;
        let mut t = Table::new(["experiment", "metric", "value", "trials", "length"]);
        let rows = [
            ("adf_random_walk", "rejection_rate_5pct", adf.size, cfg.trials, cfg.length),
            ("adf_ar1", "rejection_rate_5pct", adf.power, cfg.trials, cfg.length),
            ("johansen_cointegrated", "share_rank_1", j.cointegrated_rank1, cfg.johansen_trials, cfg.johansen_length),
            ("johansen_independent", "share_rank_0", j.independent_rank0, cfg.johansen_trials, cfg.johansen_length),
            ("johansen_all", "max_trace_discrepancy", j.max_trace_discrepancy, cfg.johansen_trials, cfg.johansen_length),
            ("residual_battery_white_noise", "cointegrated_share_1pct", eg, cfg.trials, cfg.length),
        ];
        for (e, m, v, n, len) in rows {
            t.push(vec![e.into(), m.into(), num(v), n.to_string(), len.to_string()]);
        }
        let mut text = Table::new(["experiment", "metric", "value"]);
        for r in &t.rows {
            text.push(vec![r[0].clone(), r[1].clone(), r[2].clone()]);
        }
        Ok(vec![
            self.csv("montecarlo.csv", &t),
            Output {
                path: "montecarlo.txt".into(),
                contents: text.to_text(&format!("Monte Carlo experiments, seed {}", self.seed), &self.hash),
            },
        ])
    }
}

/// start, end, lag, ue lag, slope, ue slope, intercept
type SegmentRow = (Period, Option<Period>, i64, Option<i64>, f64, Option<f64>, f64);

/// Text table without its hash line.
fn body(s: &str) -> String {
    s.split_once('\n').map_or(String::new(), |(_, rest)| rest.to_string())
}

fn cell(st: &Statistic) -> String {
    let star = if st.rejects(Significance::One) { "*" } else { "" };
    format!("{:.2}{star} ({:.2})", st.value, st.critical.one)
}

fn transform_label(t: SeriesTransform) -> &'static str {
    match t {
        SeriesTransform::Level => "level",
        SeriesTransform::Diff => "diff",
        SeriesTransform::GrowthRate => "growth_rate",
        SeriesTransform::GrowthRateDiff => "growth_rate_diff",
    }
}

fn deterministic_label(d: laborcast_core::unitroot::Deterministic) -> &'static str {
    match d {
        laborcast_core::unitroot::Deterministic::Constant => "constant",
        laborcast_core::unitroot::Deterministic::ConstantAndTrend => "constant_and_trend",
    }
}

fn kind_label(k: ModelKind) -> &'static str {
    match k {
        ModelKind::Piecewise => "piecewise",
        ModelKind::Generalized => "generalized",
    }
}

fn preset_label(p: Preset) -> String {
    match p {
        Preset::Annual => "annual".into(),
        Preset::SmoothedPrediction(k) => format!("ma{k}_prediction"),
    }
}

/// Writes outputs under `dir`, creating subdirectories as needed.
pub fn write_outputs(dir: &Path, outputs: &[Output]) -> Result<()> {
    for o in outputs {
        let path = dir.join(&o.path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| AppError::io(parent, e))?;
        }
        std::fs::write(&path, &o.contents).map_err(|e| AppError::io(&path, e))?;
    }
    Ok(())
}
