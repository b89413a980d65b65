use alloc::string::String;
use alloc::vec::Vec;

use crate::series::Period;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("series too short: need {needed} usable values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("series contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("series has missing values inside its span (first at {0})")]
    InteriorMissing(Period),
    #[error("every value of the result is missing")]
    AllMissing,
    #[error("frequencies do not match")]
    FrequencyMismatch,
    #[error("series spans do not overlap")]
    EmptyOverlap,
    #[error("period {0} is outside the series span")]
    OutOfSpan(Period),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("design matrix is rank deficient; collinear columns {columns:?}")]
    RankDeficient { columns: Vec<usize> },
    #[error("singular moment matrix: {0}")]
    Singular(&'static str),
    #[error("degenerate variance: {0}")]
    DegenerateVariance(&'static str),
    #[error("calibration grid is empty")]
    EmptyGrid,
    #[error("numeric failure: {0}")]
    Numeric(&'static str),
    #[error("scenario does not cover periods {}", PeriodList(missing))]
    ScenarioTooShort { missing: Vec<Period> },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

struct PeriodList<'a>(&'a [Period]);

impl core::fmt::Display for PeriodList<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn missing_years_are_listed_plainly() {
        let e = Error::ScenarioTooShort { missing: vec![Period::annual(2008), Period::annual(2009)] };
        assert_eq!(e.to_string(), "scenario does not cover periods 2008, 2009");
    }
}
