//! Calibrated model files (TOML, version 1).
//!
//! A file holds exactly one of `[piecewise]` or `[generalized]`:
//!
//! ```toml
//! version = 1
//! name = "cpi"
//!
//! [piecewise]
//! driver_id = "lf"
//! response_id = "cpi"
//! driver_transform = "growth_rate"
//!
//! [[piecewise.segments]]
//! start = "1992"
//! lag = 1
//! slope = 0.5
//! intercept = 0.006
//! ```
//!
//! Coefficients are written with the shortest representation that parses
//! back to the same `f64`, so reloading a file reproduces predictions bit
//! for bit.

use std::path::Path;

use laborcast_core::lagmodel::{GeneralizedModel, PiecewiseLagModel};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Piecewise(PiecewiseLagModel),
    Generalized(GeneralizedModel),
}

impl FittedModel {
    pub fn response_id(&self) -> &str {
        match self {
            FittedModel::Piecewise(m) => &m.response_id,
            FittedModel::Generalized(m) => &m.response_id,
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewiseLagModel> {
        match self {
            FittedModel::Piecewise(m) => Some(m),
            FittedModel::Generalized(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFileRepr {
    version: u32,
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    piecewise: Option<PiecewiseLagModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generalized: Option<GeneralizedModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub name: String,
    pub model: FittedModel,
}

impl ModelFile {
    pub fn to_toml(&self) -> Result<String> {
        let (piecewise, generalized) = match &self.model {
            FittedModel::Piecewise(m) => (Some(m.clone()), None),
            FittedModel::Generalized(m) => (None, Some(m.clone())),
        };
        let repr = ModelFileRepr { version: MODEL_VERSION, name: self.name.clone(), piecewise, generalized };
        toml::to_string(&repr).map_err(|e| AppError::data(format!("model `{}`: {e}", self.name)))
    }

    pub fn parse(text: &str, origin: &str) -> Result<ModelFile> {
        let repr: ModelFileRepr = toml::from_str(text).map_err(|e| AppError::config(format!("{origin}: {e}")))?;
        if repr.version != MODEL_VERSION {
            return Err(AppError::config(format!(
                "{origin}: unsupported model version {} (expected {MODEL_VERSION})",
                repr.version
            )));
        }
        let model = match (repr.piecewise, repr.generalized) {
            (Some(m), None) => {
                m.validate().map_err(|e| AppError::from(e).context(origin))?;
                FittedModel::Piecewise(m)
            }
            (None, Some(m)) => {
                m.validate().map_err(|e| AppError::from(e).context(origin))?;
                FittedModel::Generalized(m)
            }
            _ => return Err(AppError::config(format!("{origin}: expected exactly one of [piecewise] or [generalized]"))),
        };
        Ok(ModelFile { name: repr.name, model })
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        ModelFile::parse(&text, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use laborcast_core::lagmodel::{predict_piecewise, DriverTransform, GeneralizedSegment, Segment};
    use laborcast_core::{Period, Series};

    fn awkward() -> PiecewiseLagModel {
        PiecewiseLagModel {
            driver_id: "lf".into(),
            response_id: "cpi".into(),
            driver_transform: DriverTransform::GrowthRate,
            segments: vec![
                Segment {
                    start: Period::annual(1971),
                    end: Some(Period::annual(1991)),
                    lag: 1,
                    slope: 1.0 / 3.0,
                    intercept: 0.1 + 0.2,
                },
                Segment { start: Period::annual(1992), end: None, lag: -1, slope: 5e-324, intercept: -1.2345678901234567e-7 },
            ],
        }
    }

    #[test]
    fn piecewise_round_trip_is_bit_exact() {
        let file = ModelFile { name: "cpi".into(), model: FittedModel::Piecewise(awkward()) };
        let text = file.to_toml().unwrap();
        let back = ModelFile::parse(&text, "t").unwrap();
        assert_eq!(back, file);
        let lf: Vec<f64> = (0..50).map(|i| 3000.0 + 17.3 * i as f64 + (i as f64).sin() * 40.0).collect();
        let lf = Series::from_values("lf", Period::annual(1965), &lf).unwrap();
        let a = predict_piecewise(&awkward(), &lf).unwrap();
        let b = predict_piecewise(back.model.as_piecewise().unwrap(), &lf).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generalized_round_trip() {
        let g = GeneralizedModel {
            lf_id: "lf".into(),
            ue_id: "ue".into(),
            response_id: "cpi".into(),
            driver_transform: DriverTransform::GrowthRate,
            segments: vec![GeneralizedSegment {
                start: Period::annual(1989),
                end: None,
                lag_lf: 1,
                lag_ue: 1,
                slope_lf: 0.4,
                slope_ue: -0.7,
                intercept: 0.03,
            }],
        };
        let file = ModelFile { name: "gen".into(), model: FittedModel::Generalized(g) };
        assert_eq!(ModelFile::parse(&file.to_toml().unwrap(), "t").unwrap(), file);
    }

    #[test]
    fn malformed_files_are_config_errors() {
        let text = ModelFile { name: "cpi".into(), model: FittedModel::Piecewise(awkward()) }.to_toml().unwrap();
        let bumped = text.replace("version = 1", "version = 9");
        assert_eq!(ModelFile::parse(&bumped, "t").unwrap_err().kind.exit_code(), 2);
        assert!(ModelFile::parse("version = 1\nname = 'x'\n", "t").is_err());
        let broken = text.replace("end = \"1991\"", "end = \"1995\"");
        assert!(ModelFile::parse(&broken, "t").is_err());
    }
}
