//! Piecewise lagged-linear models and the cumulative-curve calibrator.
//!
//! A [`PiecewiseLagModel`] predicts a response as
//! `slope · g(t − lag) + intercept`, where `g` is the driver (usually the
//! labour-force growth rate) and the coefficients change at exogenous
//! breakpoints. A [`GeneralizedModel`] adds a lagged unemployment term.
//!
//! Calibration fits each segment on its own. The default objective is the
//! RMS distance between the running sums of observed and predicted values,
//! so that uncorrelated measurement noise cancels over the segment.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evaluate::relative_cumulative_error;
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::series::{growth_rate, Gap, GapReason, Period, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DriverTransform {
    /// Relative period-over-period change of the driver level.
    GrowthRate,
    /// The driver is used as supplied.
    Identity,
}

impl DriverTransform {
    pub fn apply(self, driver: &Series) -> Result<Series> {
        match self {
            DriverTransform::GrowthRate => growth_rate(driver),
            DriverTransform::Identity => Ok(driver.clone()),
        }
    }
}

/// One regime of a piecewise law, `[start, end]` inclusive. An absent `end`
/// makes the segment open-ended.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Segment {
    pub start: Period,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub end: Option<Period>,
    pub lag: i64,
    pub slope: f64,
    pub intercept: f64,
}

impl Segment {
    pub fn contains(&self, t: &Period) -> bool {
        *t >= self.start && self.end.is_none_or(|e| *t <= e)
    }
}

fn check_segments<'a>(bounds: impl Iterator<Item = (Period, Option<Period>)> + 'a) -> Result<()> {
    let bounds: Vec<_> = bounds.collect();
    if bounds.is_empty() {
        return Err(Error::invalid("model has no segments"));
    }
    for (i, (start, end)) in bounds.iter().enumerate() {
        if let Some(end) = end {
            if end < start {
                return Err(Error::invalid(format!("segment {i} ends before it starts")));
            }
        }
        if let Some((next_start, _)) = bounds.get(i + 1) {
            if start.frequency() != next_start.frequency() {
                return Err(Error::FrequencyMismatch);
            }
            match end {
                Some(end) if end.offset(1) == *next_start => {}
                _ => {
                    return Err(Error::invalid(format!(
                        "segment {i} must end the period before segment {} starts",
                        i + 1
                    )))
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PiecewiseLagModel {
    pub driver_id: String,
    pub response_id: String,
    pub driver_transform: DriverTransform,
    pub segments: Vec<Segment>,
}

impl PiecewiseLagModel {
    /// Segments must be contiguous and in order; only the last may be open.
    pub fn validate(&self) -> Result<()> {
        check_segments(self.segments.iter().map(|s| (s.start, s.end)))
    }

    pub fn segment_for(&self, t: &Period) -> Option<&Segment> {
        self.segments.iter().find(|s| s.contains(t))
    }

    pub fn final_segment(&self) -> Option<&Segment> {
        self.segments.last()
    }
}

/// Last period a prediction can reach: the model's end, or the driver's end
/// shifted by the final lag when the model is open-ended.
fn prediction_end(last_end: Option<Period>, driver_end: Period, lag: i64) -> Period {
    last_end.unwrap_or_else(|| driver_end.offset(lag))
}

/// Predicted response for every period from the first segment's start.
pub fn predict_piecewise(model: &PiecewiseLagModel, driver: &Series) -> Result<Series> {
    predict_piecewise_with_gaps(model, driver).map(|(s, _)| s)
}

pub fn predict_piecewise_with_gaps(model: &PiecewiseLagModel, driver: &Series) -> Result<(Series, Vec<Gap>)> {
    model.validate()?;
    let g = model.driver_transform.apply(driver)?;
    let first = model.segments[0].start;
    if first.frequency() != g.frequency() {
        return Err(Error::FrequencyMismatch);
    }
    let last = model.segments.last().expect("validated");
    let end = prediction_end(last.end, g.end(), last.lag);
    let count = first.steps_to(&end) + 1;
    if count <= 0 {
        return Err(Error::EmptyOverlap);
    }
    let mut gaps = Vec::new();
    let values = (0..count)
        .map(|i| {
            let t = first.offset(i);
            let Some(seg) = model.segment_for(&t) else {
                gaps.push(Gap { period: t, reason: GapReason::NoSegment });
                return None;
            };
            match g.get(&t.offset(-seg.lag)) {
                Some(x) => Some(seg.slope * x + seg.intercept),
                None => {
                    gaps.push(Gap { period: t, reason: GapReason::UncoveredDriver });
                    None
                }
            }
        })
        .collect::<Vec<_>>();
    if values.iter().all(Option::is_none) {
        return Err(Error::AllMissing);
    }
    Ok((Series::new(model.response_id.clone(), first, values, "")?, gaps))
}

/// Segment of the generalized law
/// `π(t) = slope_lf · g(t − lag_lf) + slope_ue · UE(t − lag_ue) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneralizedSegment {
    pub start: Period,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub end: Option<Period>,
    pub lag_lf: i64,
    /// Offset at which unemployment enters, `t₁ − t₂` in the two-lag form.
    pub lag_ue: i64,
    pub slope_lf: f64,
    pub slope_ue: f64,
    pub intercept: f64,
}

impl GeneralizedSegment {
    pub fn contains(&self, t: &Period) -> bool {
        *t >= self.start && self.end.is_none_or(|e| *t <= e)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneralizedModel {
    pub lf_id: String,
    pub ue_id: String,
    pub response_id: String,
    pub driver_transform: DriverTransform,
    pub segments: Vec<GeneralizedSegment>,
}

impl GeneralizedModel {
    pub fn validate(&self) -> Result<()> {
        check_segments(self.segments.iter().map(|s| (s.start, s.end)))
    }

    pub fn segment_for(&self, t: &Period) -> Option<&GeneralizedSegment> {
        self.segments.iter().find(|s| s.contains(t))
    }
}

pub fn predict_generalized(model: &GeneralizedModel, lf: &Series, ue: &Series) -> Result<Series> {
    predict_generalized_with_gaps(model, lf, ue).map(|(s, _)| s)
}

pub fn predict_generalized_with_gaps(
    model: &GeneralizedModel,
    lf: &Series,
    ue: &Series,
) -> Result<(Series, Vec<Gap>)> {
    model.validate()?;
    let g = model.driver_transform.apply(lf)?;
    if g.frequency() != ue.frequency() || model.segments[0].start.frequency() != g.frequency() {
        return Err(Error::FrequencyMismatch);
    }
    let first = model.segments[0].start;
    let last = model.segments.last().expect("validated");
    let end = match last.end {
        Some(e) => e,
        None => {
            let a = g.end().offset(last.lag_lf);
            let b = ue.end().offset(last.lag_ue);
            a.min(b)
        }
    };
    let count = first.steps_to(&end) + 1;
    if count <= 0 {
        return Err(Error::EmptyOverlap);
    }
    let mut gaps = Vec::new();
    let values = (0..count)
        .map(|i| {
            let t = first.offset(i);
            let Some(seg) = model.segment_for(&t) else {
                gaps.push(Gap { period: t, reason: GapReason::NoSegment });
                return None;
            };
            match (g.get(&t.offset(-seg.lag_lf)), ue.get(&t.offset(-seg.lag_ue))) {
                (Some(x), Some(u)) => Some(seg.slope_lf * x + seg.slope_ue * u + seg.intercept),
                _ => {
                    gaps.push(Gap { period: t, reason: GapReason::UncoveredDriver });
                    None
                }
            }
        })
        .collect::<Vec<_>>();
    if values.iter().all(Option::is_none) {
        return Err(Error::AllMissing);
    }
    Ok((Series::new(model.response_id.clone(), first, values, "")?, gaps))
}

/// Evenly spaced grid `min, min + step, …` not exceeding `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridAxis {
    pub const fn new(min: f64, max: f64, step: f64) -> Self {
        GridAxis { min, max, step }
    }

    /// A single-point axis.
    pub const fn fixed(value: f64) -> Self {
        GridAxis { min: value, max: value, step: 1.0 }
    }

    pub fn len(&self) -> usize {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite())
            || self.step <= 0.0
            || self.max < self.min
        {
            return 0;
        }
        libm::floor((self.max - self.min) / self.step + 1e-9) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Objective {
    /// RMS distance between cumulative observed and predicted curves.
    CumulativeRms,
    /// RMS of the period-by-period error.
    AnnualRms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationConfig {
    /// First period of each new segment.
    pub breakpoints: Vec<Period>,
    pub lag_min: i64,
    pub lag_max: i64,
    pub slope: GridAxis,
    pub intercept: GridAxis,
    /// Unemployment coefficient axis (generalized model only).
    pub ue_slope: GridAxis,
    /// Unemployment offset range (generalized model only).
    pub ue_lag_min: i64,
    pub ue_lag_max: i64,
    pub refine: bool,
    pub objective: Objective,
    pub driver_transform: DriverTransform,
    /// Restricts the response periods used for fitting.
    pub span: Option<(Period, Period)>,
    /// Holds the slope of segment `index` at the given value.
    pub fixed_slopes: Vec<(usize, f64)>,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            breakpoints: Vec::new(),
            lag_min: -1,
            lag_max: 3,
            slope: GridAxis::new(-8.0, 8.0, 0.01),
            intercept: GridAxis::new(-0.10, 0.10, 0.0005),
            ue_slope: GridAxis::new(-8.0, 8.0, 0.05),
            ue_lag_min: -1,
            ue_lag_max: 3,
            refine: true,
            objective: Objective::CumulativeRms,
            driver_transform: DriverTransform::GrowthRate,
            span: None,
            fixed_slopes: Vec::new(),
        }
    }
}

impl CalibrationConfig {
    fn validate(&self) -> Result<()> {
        if self.slope.is_empty() || self.intercept.is_empty() || self.ue_slope.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if self.lag_min > self.lag_max || self.ue_lag_min > self.ue_lag_max {
            return Err(Error::EmptyGrid);
        }
        if self.breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        Ok(())
    }

    fn slope_axis(&self, segment: usize) -> GridAxis {
        self.fixed_slopes
            .iter()
            .find(|(i, _)| *i == segment)
            .map_or(self.slope, |(_, v)| GridAxis::fixed(*v))
    }
}

pub const MIN_SEGMENT_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentDiagnostics {
    pub start: Period,
    pub end: Period,
    pub nobs: usize,
    /// Objective at the best grid cell.
    pub grid_objective: f64,
    /// Objective of the reported coefficients (after refinement, if any).
    pub objective: f64,
    pub cumulative_rms: f64,
    pub annual_rms: f64,
    /// Observed minus predicted over the fitted periods.
    pub residuals: Series,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationDiagnostics {
    pub segments: Vec<SegmentDiagnostics>,
    /// `(cum obs − cum pred) / cum obs` from the first fitted period.
    pub relative_cumulative_error: Series,
}

impl CalibrationDiagnostics {
    /// Worst segment objective.
    pub fn objective(&self) -> f64 {
        self.segments.iter().map(|s| s.objective).fold(0.0, f64::max)
    }
}

/// The fitting problem of one segment at fixed lags: `y ≈ Σ c_i x_i`, with
/// the intercept column last.
struct Design {
    y: Vec<f64>,
    xs: Vec<Vec<f64>>,
}

impl Design {
    fn cumulated(&self) -> Design {
        let running = |v: &Vec<f64>| {
            let mut acc = 0.0;
            v.iter().map(|x| { acc += x; acc }).collect::<Vec<f64>>()
        };
        Design { y: running(&self.y), xs: self.xs.iter().map(running).collect() }
    }

    fn rms(&self, coefs: &[f64]) -> f64 {
        let n = self.y.len();
        let ss: f64 = (0..n)
            .map(|k| {
                let fit: f64 = coefs.iter().zip(&self.xs).map(|(c, x)| c * x[k]).sum();
                let e = self.y[k] - fit;
                e * e
            })
            .sum();
        libm::sqrt(ss / n as f64)
    }
}

/// Sufficient statistics of a [`Design`]: mean squared error is
/// `(yy − 2 cᵀxy + cᵀ XX c) / n`.
struct QuadForm {
    n: f64,
    yy: f64,
    xy: Vec<f64>,
    xx: Vec<Vec<f64>>,
}

impl QuadForm {
    fn new(d: &Design) -> Self {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        QuadForm {
            n: d.y.len() as f64,
            yy: dot(&d.y, &d.y),
            xy: d.xs.iter().map(|x| dot(x, &d.y)).collect(),
            xx: d.xs.iter().map(|a| d.xs.iter().map(|b| dot(a, b)).collect()).collect(),
        }
    }

    fn mse(&self, c: &[f64]) -> f64 {
        let m = c.len();
        let mut q = self.yy;
        for i in 0..m {
            q -= 2.0 * c[i] * self.xy[i];
            for j in 0..m {
                q += c[i] * c[j] * self.xx[i][j];
            }
        }
        q / self.n
    }

    /// Best grid intercept for fixed slopes. The objective is a convex
    /// parabola in the intercept, so the grid minimum is one of the two grid
    /// points around the continuous minimizer.
    fn best_intercept(&self, coefs: &mut [f64], axis: &GridAxis) -> f64 {
        let b = coefs.len() - 1;
        let len = axis.len();
        let mut cands = [0usize, len - 1];
        if self.xx[b][b] > 0.0 {
            let mut num = self.xy[b];
            for i in 0..b {
                num -= coefs[i] * self.xx[i][b];
            }
            let u = (num / self.xx[b][b] - axis.min) / axis.step;
            let lo = libm::floor(u).clamp(0.0, (len - 1) as f64) as usize;
            cands = [lo, (lo + 1).min(len - 1)];
        }
        let mut best = f64::INFINITY;
        let mut best_value = axis.value(cands[0]);
        for &i in &cands {
            let v = axis.value(i);
            coefs[b] = v;
            let f = self.mse(coefs);
            if f < best || (f == best && v.abs() < best_value.abs()) {
                best = f;
                best_value = v;
            }
        }
        coefs[b] = best_value;
        best
    }
}

/// Candidate ordering: objective, then smaller |lag|, then smaller |slope|,
/// then the raw values so the order is total.
#[derive(Debug, Clone)]
struct Candidate {
    objective: f64,
    lags: Vec<i64>,
    coefs: Vec<f64>,
    grid_objective: f64,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        use core::cmp::Ordering;
        let key = |c: &Candidate| {
            let lag_abs: i64 = c.lags.iter().map(|l| l.abs()).sum();
            let slope_abs: f64 = c.coefs[..c.coefs.len() - 1].iter().map(|s| s.abs()).sum();
            (lag_abs, slope_abs)
        };
        let (la, sa) = key(self);
        let (lb, sb) = key(other);
        let ord = self
            .objective
            .total_cmp(&other.objective)
            .then(la.cmp(&lb))
            .then(sa.total_cmp(&sb))
            .then_with(|| self.lags.cmp(&other.lags))
            .then_with(|| {
                self.coefs
                    .iter()
                    .zip(&other.coefs)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            });
        ord == Ordering::Less
    }
}

/// Scans the slope axes exhaustively; the intercept (last coefficient) is
/// minimized exactly per cell.
fn grid_search(form: &QuadForm, slope_axes: &[GridAxis], intercept: &GridAxis) -> (Vec<f64>, f64) {
    let m = slope_axes.len();
    let mut idx = vec![0usize; m];
    let mut coefs = vec![0.0; m + 1];
    let mut best_coefs = coefs.clone();
    let mut best = f64::INFINITY;
    loop {
        for (k, axis) in slope_axes.iter().enumerate() {
            coefs[k] = axis.value(idx[k]);
        }
        let f = form.best_intercept(&mut coefs, intercept);
        let slope_abs = |c: &[f64]| c[..m].iter().map(|v| v.abs()).sum::<f64>();
        if f < best || (f == best && slope_abs(&coefs) < slope_abs(&best_coefs)) {
            best = f;
            best_coefs.copy_from_slice(&coefs);
        }
        let mut k = 0;
        loop {
            if k == m {
                return (best_coefs, libm::sqrt(best.max(0.0)));
            }
            idx[k] += 1;
            if idx[k] < slope_axes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Fits one segment for one lag combination.
fn fit_cell(design: &Design, cfg: &CalibrationConfig, slope_axes: &[GridAxis]) -> Candidate {
    let target = match cfg.objective {
        Objective::CumulativeRms => design.cumulated(),
        Objective::AnnualRms => Design { y: design.y.clone(), xs: design.xs.clone() },
    };
    let form = QuadForm::new(&target);
    let (coefs, _) = grid_search(&form, slope_axes, &cfg.intercept);
    let grid_objective = target.rms(&coefs);
    let mut cand = Candidate { objective: grid_objective, lags: Vec::new(), coefs, grid_objective };
    if cfg.refine {
        // Only coefficients with a real axis are free.
        let free: Vec<usize> = slope_axes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.len() > 1)
            .map(|(i, _)| i)
            .chain(core::iter::once(slope_axes.len()))
            .collect();
        let steps: Vec<f64> = free
            .iter()
            .map(|&i| if i < slope_axes.len() { slope_axes[i].step } else { cfg.intercept.step })
            .collect();
        let start: Vec<f64> = free.iter().map(|&i| cand.coefs[i]).collect();
        let base = cand.coefs.clone();
        let eval = |x: &[f64]| {
            let mut c = base.clone();
            for (k, &i) in free.iter().enumerate() {
                c[i] = x[k];
            }
            target.rms(&c)
        };
        let options = NelderMeadOptions { max_iterations: 20_000, f_tolerance: 1e-20, x_tolerance: 1e-13 };
        let m = nelder_mead(eval, &start, &steps, &options);
        if m.value < cand.objective {
            for (k, &i) in free.iter().enumerate() {
                cand.coefs[i] = m.x[k];
            }
            cand.objective = m.value;
        }
    }
    cand
}

struct SegmentBounds {
    lo: Period,
    hi: Period,
}

/// Segment bounds over the candidate response periods.
fn segment_bounds(first: Period, last: Period, breakpoints: &[Period]) -> Result<Vec<SegmentBounds>> {
    let mut cuts: Vec<Period> = breakpoints.iter().copied().filter(|b| *b > first && *b <= last).collect();
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = first;
    for c in cuts {
        out.push(SegmentBounds { lo, hi: c.offset(-1) });
        lo = c;
    }
    out.push(SegmentBounds { lo, hi: last });
    Ok(out)
}

fn response_range(response: &Series, cfg: &CalibrationConfig) -> Result<(Period, Period)> {
    let (mut first, mut last) = (response.start(), response.end());
    if let Some((a, b)) = cfg.span {
        if a.frequency() != response.frequency() || b.frequency() != response.frequency() {
            return Err(Error::FrequencyMismatch);
        }
        first = first.max(a);
        last = last.min(b);
    }
    if first > last {
        return Err(Error::EmptyOverlap);
    }
    Ok((first, last))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibrated<M> {
    pub model: M,
    pub diagnostics: CalibrationDiagnostics,
}

/// Fits a [`PiecewiseLagModel`] of `response` on `driver` (levels when the
/// transform is [`DriverTransform::GrowthRate`]).
///
/// Each segment is fitted on the periods where the response and the driver at
/// every candidate lag are all present, so lags compete on the same sample.
pub fn calibrate(driver: &Series, response: &Series, cfg: &CalibrationConfig) -> Result<Calibrated<PiecewiseLagModel>> {
    cfg.validate()?;
    let g = cfg.driver_transform.apply(driver)?;
    if g.frequency() != response.frequency() {
        return Err(Error::FrequencyMismatch);
    }
    let (first, last) = response_range(response, cfg)?;
    let lags: Vec<i64> = (cfg.lag_min..=cfg.lag_max).collect();
    let usable = |t: &Period| response.get(t).is_some() && lags.iter().all(|l| g.get(&t.offset(-l)).is_some());

    let mut segments = Vec::new();
    let mut seg_diag = Vec::new();
    let bounds = segment_bounds(first, last, &cfg.breakpoints)?;
    let n_bounds = bounds.len();
    for (si, b) in bounds.iter().enumerate() {
        let periods: Vec<Period> =
            (0..=b.lo.steps_to(&b.hi)).map(|i| b.lo.offset(i)).filter(|t| usable(t)).collect();
        if periods.len() < MIN_SEGMENT_POINTS {
            return Err(Error::TooShort { needed: MIN_SEGMENT_POINTS, got: periods.len() });
        }
        let y: Vec<f64> = periods.iter().map(|t| response.get(t).unwrap_or_default()).collect();
        let slope_axes = [cfg.slope_axis(si)];
        let mut best: Option<Candidate> = None;
        for &lag in &lags {
            let x: Vec<f64> = periods.iter().map(|t| g.get(&t.offset(-lag)).unwrap_or_default()).collect();
            let design = Design { y: y.clone(), xs: vec![x, vec![1.0; periods.len()]] };
            let mut cand = fit_cell(&design, cfg, &slope_axes);
            cand.lags = vec![lag];
            if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                best = Some(cand);
            }
        }
        let best = best.ok_or(Error::EmptyGrid)?;
        let seg = Segment {
            start: if si == 0 { periods[0] } else { b.lo },
            end: if si + 1 == n_bounds { None } else { Some(b.hi) },
            lag: best.lags[0],
            slope: best.coefs[0],
            intercept: best.coefs[1],
        };
        let x: Vec<f64> = periods.iter().map(|t| g.get(&t.offset(-seg.lag)).unwrap_or_default()).collect();
        let design = Design { y: y.clone(), xs: vec![x, vec![1.0; periods.len()]] };
        seg_diag.push(segment_diagnostics(&design, &best, &periods, response)?);
        segments.push(seg);
    }
    let model = PiecewiseLagModel {
        driver_id: String::from(driver.id()),
        response_id: String::from(response.id()),
        driver_transform: cfg.driver_transform,
        segments,
    };
    let predicted = predict_piecewise(&model, driver)?;
    let relative = relative_cumulative_error(&response.window(first, last)?, &predicted, model.segments[0].start)?;
    Ok(Calibrated { model, diagnostics: CalibrationDiagnostics { segments: seg_diag, relative_cumulative_error: relative } })
}

fn segment_diagnostics(design: &Design, best: &Candidate, periods: &[Period], response: &Series) -> Result<SegmentDiagnostics> {
    let coefs = &best.coefs;
    let n = periods.len();
    let start = periods[0];
    let end = periods[n - 1];
    let mut residuals = vec![None; (start.steps_to(&end) + 1) as usize];
    for (k, t) in periods.iter().enumerate() {
        let fit: f64 = coefs.iter().zip(&design.xs).map(|(c, x)| c * x[k]).sum();
        residuals[start.steps_to(t) as usize] = Some(design.y[k] - fit);
    }
    Ok(SegmentDiagnostics {
        start,
        end,
        nobs: n,
        grid_objective: best.grid_objective,
        objective: best.objective,
        cumulative_rms: design.cumulated().rms(coefs),
        annual_rms: design.rms(coefs),
        residuals: Series::new(response.id(), start, residuals, response.units())?,
    })
}

/// Fits a [`GeneralizedModel`]: labour-force growth at lag `lag_lf`,
/// unemployment at offset `lag_ue`, and an intercept, per segment.
pub fn calibrate_generalized(
    lf: &Series,
    ue: &Series,
    response: &Series,
    cfg: &CalibrationConfig,
) -> Result<Calibrated<GeneralizedModel>> {
    cfg.validate()?;
    let g = cfg.driver_transform.apply(lf)?;
    if g.frequency() != response.frequency() || ue.frequency() != response.frequency() {
        return Err(Error::FrequencyMismatch);
    }
    let (first, last) = response_range(response, cfg)?;
    let lags: Vec<i64> = (cfg.lag_min..=cfg.lag_max).collect();
    let ue_lags: Vec<i64> = (cfg.ue_lag_min..=cfg.ue_lag_max).collect();
    let usable = |t: &Period| {
        response.get(t).is_some()
            && lags.iter().all(|l| g.get(&t.offset(-l)).is_some())
            && ue_lags.iter().all(|l| ue.get(&t.offset(-l)).is_some())
    };

    let bounds = segment_bounds(first, last, &cfg.breakpoints)?;
    let n_bounds = bounds.len();
    let mut segments = Vec::new();
    let mut seg_diag = Vec::new();
    for (si, b) in bounds.iter().enumerate() {
        let periods: Vec<Period> =
            (0..=b.lo.steps_to(&b.hi)).map(|i| b.lo.offset(i)).filter(|t| usable(t)).collect();
        if periods.len() < MIN_SEGMENT_POINTS {
            return Err(Error::TooShort { needed: MIN_SEGMENT_POINTS, got: periods.len() });
        }
        let y: Vec<f64> = periods.iter().map(|t| response.get(t).unwrap_or_default()).collect();
        let design_for = |lag: i64, ue_lag: i64| Design {
            y: y.clone(),
            xs: vec![
                periods.iter().map(|t| g.get(&t.offset(-lag)).unwrap_or_default()).collect(),
                periods.iter().map(|t| ue.get(&t.offset(-ue_lag)).unwrap_or_default()).collect(),
                vec![1.0; periods.len()],
            ],
        };
        let slope_axes = [cfg.slope_axis(si), cfg.ue_slope];
        let mut best: Option<Candidate> = None;
        for &lag in &lags {
            for &ue_lag in &ue_lags {
                let mut cand = fit_cell(&design_for(lag, ue_lag), cfg, &slope_axes);
                cand.lags = vec![lag, ue_lag];
                if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                    best = Some(cand);
                }
            }
        }
        let best = best.ok_or(Error::EmptyGrid)?;
        segments.push(GeneralizedSegment {
            start: if si == 0 { periods[0] } else { b.lo },
            end: if si + 1 == n_bounds { None } else { Some(b.hi) },
            lag_lf: best.lags[0],
            lag_ue: best.lags[1],
            slope_lf: best.coefs[0],
            slope_ue: best.coefs[1],
            intercept: best.coefs[2],
        });
        seg_diag.push(segment_diagnostics(&design_for(best.lags[0], best.lags[1]), &best, &periods, response)?);
    }
    let model = GeneralizedModel {
        lf_id: String::from(lf.id()),
        ue_id: String::from(ue.id()),
        response_id: String::from(response.id()),
        driver_transform: cfg.driver_transform,
        segments,
    };
    let predicted = predict_generalized(&model, lf, ue)?;
    let relative = relative_cumulative_error(&response.window(first, last)?, &predicted, model.segments[0].start)?;
    Ok(Calibrated { model, diagnostics: CalibrationDiagnostics { segments: seg_diag, relative_cumulative_error: relative } })
}
