//! Fit and forecast-quality metrics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::series::{align, moving_average, Period, Series};

fn overlap(obs: &Series, pred: &Series) -> Result<Vec<(f64, f64)>> {
    let pairs = align(obs, pred)?;
    if pairs.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    Ok(pairs.into_iter().map(|p| (p.a, p.b)).collect())
}

fn r_squared_pairs(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 3 {
        return Err(Error::TooShort { needed: 3, got: pairs.len() });
    }
    let n = pairs.len() as f64;
    let mean = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let sst: f64 = pairs.iter().map(|p| (p.0 - mean) * (p.0 - mean)).sum();
    let ssr: f64 = pairs.iter().map(|p| (p.0 - p.1) * (p.0 - p.1)).sum();
    if sst <= 0.0 || !sst.is_finite() {
        return Err(Error::DegenerateVariance("observed series is constant"));
    }
    Ok(1.0 - ssr / sst)
}

/// `1 − SSR/SST` around the observed mean over the aligned overlap. Not
/// clamped, so a poor model can score below zero.
pub fn r_squared(obs: &Series, pred: &Series) -> Result<f64> {
    r_squared_pairs(&overlap(obs, pred)?)
}

fn rms(errors: impl Iterator<Item = f64>) -> f64 {
    let (n, ss) = errors.fold((0usize, 0.0), |(n, ss), e| (n + 1, ss + e * e));
    libm::sqrt(ss / n as f64)
}

pub fn rmsfe(obs: &Series, pred: &Series) -> Result<f64> {
    Ok(rms(overlap(obs, pred)?.iter().map(|(o, p)| o - p)))
}

/// RMS error of the no-change forecast `x(t − horizon)`.
pub fn naive_rmsfe(s: &Series, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    if s.len() < horizon + 1 {
        return Err(Error::TooShort { needed: horizon + 1, got: s.len() });
    }
    let v = s.values();
    let diffs: Vec<f64> = (horizon..v.len())
        .filter_map(|i| Some(v[i]? - v[i - horizon]?))
        .collect();
    if diffs.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    Ok(rms(diffs.into_iter()))
}

/// `(Σobs − Σpred) / Σobs`, both summed from `base`. A missing value on
/// either side stops the sums; a zero observed sum leaves a missing point.
pub fn relative_cumulative_error(obs: &Series, pred: &Series, base: Period) -> Result<Series> {
    if obs.frequency() != pred.frequency() || base.frequency() != obs.frequency() {
        return Err(Error::FrequencyMismatch);
    }
    if !obs.contains(&base) || !pred.contains(&base) {
        return Err(Error::OutOfSpan(base));
    }
    let end = obs.end().min(pred.end());
    let mut sums = Some((0.0, 0.0));
    let values = (0..=base.steps_to(&end))
        .map(|i| {
            let t = base.offset(i);
            sums = match (sums, obs.get(&t), pred.get(&t)) {
                (Some((co, cp)), Some(o), Some(p)) => Some((co + o, cp + p)),
                _ => None,
            };
            let (co, cp) = sums?;
            (co != 0.0).then(|| (co - cp) / co)
        })
        .collect();
    Series::new(obs.id(), base, values, "ratio")
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub span: (Period, Period),
    pub nobs: usize,
    pub r2_annual: f64,
    /// R² between the running sums of observed and predicted values.
    pub r2_cumulative: f64,
    pub rmsfe: f64,
    /// Random-walk benchmark on the observed series over the same span.
    pub naive_rmsfe: f64,
    pub relative_cumulative_error: Series,
}

/// How the prediction is treated before it is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Annual,
    /// Trailing MA(k) of the prediction against the raw observations.
    SmoothedPrediction(usize),
}

impl Preset {
    pub const MA3: Preset = Preset::SmoothedPrediction(3);
}

/// Scores `pred` against `obs` on their common span, optionally clipped to
/// `span`.
pub fn evaluate(obs: &Series, pred: &Series, span: Option<(Period, Period)>, preset: Preset) -> Result<EvaluationReport> {
    let pred = match preset {
        Preset::Annual => pred.clone(),
        Preset::SmoothedPrediction(k) => moving_average(pred, k)?,
    };
    let pairs = align(obs, &pred)?;
    let (mut from, mut to) = match (pairs.first(), pairs.last()) {
        (Some(a), Some(b)) => (a.period, b.period),
        _ => return Err(Error::EmptyOverlap),
    };
    if let Some((a, b)) = span {
        from = from.max(a);
        to = to.min(b);
    }
    if from > to {
        return Err(Error::EmptyOverlap);
    }
    let obs_w = obs.window(from, to)?;
    let pred_w = pred.window(from, to)?;
    let pairs = overlap(&obs_w, &pred_w)?;
    let r2_annual = r_squared_pairs(&pairs)?;
    let mut co = 0.0;
    let mut cp = 0.0;
    let cumulative: Vec<(f64, f64)> = pairs
        .iter()
        .map(|(o, p)| {
            co += o;
            cp += p;
            (co, cp)
        })
        .collect();
    Ok(EvaluationReport {
        span: (from, to),
        nobs: pairs.len(),
        r2_annual,
        r2_cumulative: r_squared_pairs(&cumulative)?,
        rmsfe: rms(pairs.iter().map(|(o, p)| o - p)),
        naive_rmsfe: naive_rmsfe(&obs_w, 1)?,
        relative_cumulative_error: relative_cumulative_error(&obs_w, &pred_w, from)?,
    })
}
