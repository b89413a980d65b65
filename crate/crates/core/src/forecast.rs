//! Projection of inflation and unemployment from labour-force scenarios.
//!
//! Only the final, open-ended segment of a model is used.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lagmodel::{DriverTransform, GeneralizedModel, PiecewiseLagModel, Segment};
use crate::series::{Frequency, Period, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastScenario {
    pub name: String,
    /// Labour-force levels.
    pub lf_path: Series,
}

impl ForecastScenario {
    pub fn new(name: impl Into<String>, lf_path: Series) -> Result<Self> {
        if lf_path.frequency() != Frequency::Annual {
            return Err(Error::invalid("scenario paths must be annual"));
        }
        if lf_path.values().iter().any(|v| v.is_some_and(|x| x <= 0.0)) {
            return Err(Error::invalid("scenario labour-force levels must be positive"));
        }
        Ok(ForecastScenario { name: name.into(), lf_path })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    pub scenario: String,
    pub inflation_model: String,
    pub inflation: Series,
    pub unemployment_model: Option<String>,
    pub unemployment: Option<Series>,
}

fn final_open_segment(model: &PiecewiseLagModel) -> Result<Segment> {
    model.validate()?;
    let seg = *model.final_segment().expect("validated");
    if seg.end.is_some() {
        return Err(Error::invalid("the model's final segment must be open-ended to forecast"));
    }
    Ok(seg)
}

/// Driver value at `t` for the scenario, or the level periods it needs.
fn driver_at(transform: DriverTransform, lf: &Series, t: Period) -> core::result::Result<f64, Vec<Period>> {
    match transform {
        DriverTransform::Identity => lf.get(&t).ok_or_else(|| alloc::vec![t]),
        DriverTransform::GrowthRate => {
            let prev = t.offset(-1);
            match (lf.get(&prev), lf.get(&t)) {
                (Some(a), Some(b)) if a != 0.0 => Ok((b - a) / a),
                (a, b) => Err([(prev, a), (t, b)].into_iter().filter(|(_, v)| v.is_none()).map(|(p, _)| p).collect()),
            }
        }
    }
}

fn project_segment(seg: &Segment, transform: DriverTransform, id: &str, lf: &Series, from: Period, to: Period) -> Result<Series> {
    if from.frequency() != lf.frequency() || to.frequency() != lf.frequency() {
        return Err(Error::FrequencyMismatch);
    }
    if from > to {
        return Err(Error::invalid("forecast start is after its end"));
    }
    let mut missing = BTreeSet::new();
    let values: Vec<Option<f64>> = (0..=from.steps_to(&to))
        .map(|i| match driver_at(transform, lf, from.offset(i - seg.lag)) {
            Ok(g) => Some(seg.slope * g + seg.intercept),
            Err(m) => {
                missing.extend(m);
                None
            }
        })
        .collect();
    if !missing.is_empty() {
        return Err(Error::ScenarioTooShort { missing: missing.into_iter().collect() });
    }
    Series::new(id, from, values, "rate per period")
}

/// Applies the final segments of the inflation model (and optionally the
/// unemployment model) to the scenario over `[from, to]`.
pub fn project(
    inflation: &PiecewiseLagModel,
    unemployment: Option<&PiecewiseLagModel>,
    scenario: &ForecastScenario,
    from: Period,
    to: Period,
) -> Result<ForecastResult> {
    let seg = final_open_segment(inflation)?;
    let infl = project_segment(&seg, inflation.driver_transform, &inflation.response_id, &scenario.lf_path, from, to)?;
    let ue = match unemployment {
        Some(m) => {
            let s = final_open_segment(m)?;
            Some(project_segment(&s, m.driver_transform, &m.response_id, &scenario.lf_path, from, to)?)
        }
        None => None,
    };
    Ok(ForecastResult {
        scenario: scenario.name.clone(),
        inflation_model: inflation.response_id.clone(),
        inflation: infl,
        unemployment_model: unemployment.map(|m| m.response_id.clone()),
        unemployment: ue,
    })
}

/// Like [`project`] with the generalized inflation law. Unemployment inside
/// that law comes from the projected unemployment path, so its offset must
/// be non-negative.
pub fn project_generalized(
    inflation: &GeneralizedModel,
    unemployment: &PiecewiseLagModel,
    scenario: &ForecastScenario,
    from: Period,
    to: Period,
) -> Result<ForecastResult> {
    inflation.validate()?;
    let seg = *inflation.segments.last().expect("validated");
    if seg.end.is_some() {
        return Err(Error::invalid("the model's final segment must be open-ended to forecast"));
    }
    if seg.lag_ue < 0 {
        return Err(Error::invalid("unemployment must enter with a non-negative offset to forecast"));
    }
    let ue_seg = final_open_segment(unemployment)?;
    let lf = &scenario.lf_path;
    let ue_from = from.offset(-seg.lag_ue);
    let ue_path = project_segment(&ue_seg, unemployment.driver_transform, &unemployment.response_id, lf, ue_from, to)?;
    let as_piece = Segment { start: seg.start, end: None, lag: seg.lag_lf, slope: seg.slope_lf, intercept: seg.intercept };
    let lf_part = project_segment(&as_piece, inflation.driver_transform, &inflation.response_id, lf, from, to)?;
    let values = lf_part
        .iter()
        .map(|(t, v)| Some(v? + seg.slope_ue * ue_path.get(&t.offset(-seg.lag_ue))?))
        .collect();
    let infl = Series::new(inflation.response_id.clone(), from, values, "rate per period")?;
    Ok(ForecastResult {
        scenario: scenario.name.clone(),
        inflation_model: inflation.response_id.clone(),
        inflation: infl,
        unemployment_model: Some(unemployment.response_id.clone()),
        unemployment: Some(ue_path.window(from, to)?),
    })
}
