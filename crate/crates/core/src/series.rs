//! Period-indexed series and the transforms every other module consumes.
//!
//! Missing observations are explicit (`None`) and propagate point-wise
//! through every transform. Nothing is interpolated.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Frequency {
    Annual,
    Quarterly,
}

impl Frequency {
    pub fn periods_per_year(self) -> i64 {
        match self {
            Frequency::Annual => 1,
            Frequency::Quarterly => 4,
        }
    }
}

/// A year, or a year and quarter for quarterly data.
///
/// Ordering is only meaningful between periods of the same frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Period {
    pub year: i32,
    pub quarter: Option<u8>,
}

impl Period {
    pub const fn annual(year: i32) -> Self {
        Period { year, quarter: None }
    }

    pub fn quarterly(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::invalid(format!("quarter {quarter} not in 1..4")));
        }
        Ok(Period { year, quarter: Some(quarter) })
    }

    pub fn frequency(&self) -> Frequency {
        match self.quarter {
            None => Frequency::Annual,
            Some(_) => Frequency::Quarterly,
        }
    }

    fn ordinal(&self) -> i64 {
        match self.quarter {
            None => self.year as i64,
            Some(q) => self.year as i64 * 4 + (q as i64 - 1),
        }
    }

    fn from_ordinal(ordinal: i64, frequency: Frequency) -> Self {
        match frequency {
            Frequency::Annual => Period::annual(ordinal as i32),
            Frequency::Quarterly => Period {
                year: ordinal.div_euclid(4) as i32,
                quarter: Some(ordinal.rem_euclid(4) as u8 + 1),
            },
        }
    }

    /// The period `n` steps later (earlier for negative `n`).
    pub fn offset(&self, n: i64) -> Self {
        Period::from_ordinal(self.ordinal() + n, self.frequency())
    }

    /// Number of steps from `self` to `other` (negative if `other` is earlier).
    pub fn steps_to(&self, other: &Period) -> i64 {
        other.ordinal() - self.ordinal()
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.quarter {
            None => write!(f, "{}", self.year),
            Some(q) => write!(f, "{}Q{}", self.year, q),
        }
    }
}

impl FromStr for Period {
    type Err = Error;

    /// Parses `YYYY` or `YYYYQn`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed period {s:?}"));
        let (year, quarter) = match s.find('Q') {
            Some(pos) => (&s[..pos], Some(&s[pos + 1..])),
            None => (s, None),
        };
        if year.len() != 4 || !year.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let year: i32 = year.parse().map_err(|_| bad())?;
        match quarter {
            None => Ok(Period::annual(year)),
            Some(q) if q.len() == 1 => {
                let q: u8 = q.parse().map_err(|_| bad())?;
                Period::quarterly(year, q).map_err(|_| bad())
            }
            Some(_) => Err(bad()),
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Period {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Period {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = Period;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a period such as 1991 or 1991Q3")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> core::result::Result<Period, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> core::result::Result<Period, E> {
                i32::try_from(v).map(Period::annual).map_err(E::custom)
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> core::result::Result<Period, E> {
                i32::try_from(v).map(Period::annual).map_err(E::custom)
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

/// Why a transform produced a missing point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapReason {
    MissingInput,
    ZeroDenominator,
    /// The driver series does not cover the lagged period.
    UncoveredDriver,
    /// The period falls in no model segment.
    NoSegment,
    ZeroCumulative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gap {
    pub period: Period,
    pub reason: GapReason,
}

/// A contiguous run of observations starting at `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    id: String,
    start: Period,
    values: Vec<Option<f64>>,
    units: String,
}

impl Series {
    pub fn new(
        id: impl Into<String>,
        start: Period,
        values: Vec<Option<f64>>,
        units: impl Into<String>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooShort { needed: 1, got: 0 });
        }
        if let Some(i) = values.iter().position(|v| matches!(v, Some(x) if !x.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Series { id: id.into(), start, values, units: units.into() })
    }

    /// A series with no missing values.
    pub fn from_values(id: impl Into<String>, start: Period, values: &[f64]) -> Result<Self> {
        Series::new(id, start, values.iter().copied().map(Some).collect(), "")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn units(&self) -> &str {
        &self.units
    }

    pub fn frequency(&self) -> Frequency {
        self.start.frequency()
    }

    pub fn start(&self) -> Period {
        self.start
    }

    pub fn end(&self) -> Period {
        self.start.offset(self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn period_at(&self, index: usize) -> Period {
        self.start.offset(index as i64)
    }

    fn index_of(&self, period: &Period) -> Option<usize> {
        if period.frequency() != self.frequency() {
            return None;
        }
        let i = self.start.steps_to(period);
        (0..self.values.len() as i64).contains(&i).then_some(i as usize)
    }

    pub fn contains(&self, period: &Period) -> bool {
        self.index_of(period).is_some()
    }

    /// Value at `period`; `None` when outside the span or missing.
    pub fn get(&self, period: &Period) -> Option<f64> {
        self.index_of(period).and_then(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Period, Option<f64>)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (self.period_at(i), *v))
    }

    pub fn count_present(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }

    /// Restricts the series to `[from, to]` intersected with its own span.
    pub fn window(&self, from: Period, to: Period) -> Result<Series> {
        if from.frequency() != self.frequency() || to.frequency() != self.frequency() {
            return Err(Error::FrequencyMismatch);
        }
        let lo = self.start.steps_to(&from).max(0);
        let hi = self.start.steps_to(&to).min(self.values.len() as i64 - 1);
        if lo > hi {
            return Err(Error::EmptyOverlap);
        }
        self.derived(
            self.period_at(lo as usize),
            self.values[lo as usize..=hi as usize].to_vec(),
            self.units.clone(),
        )
    }

    /// The longest run without missing values at either end, as a plain
    /// slice. Errors if a value is missing in the interior.
    pub fn contiguous(&self) -> Result<(Period, Vec<f64>)> {
        let first = self.values.iter().position(Option::is_some).ok_or(Error::AllMissing)?;
        let last = self.values.iter().rposition(Option::is_some).ok_or(Error::AllMissing)?;
        let mut out = Vec::with_capacity(last - first + 1);
        for i in first..=last {
            match self.values[i] {
                Some(v) => out.push(v),
                None => return Err(Error::InteriorMissing(self.period_at(i))),
            }
        }
        Ok((self.period_at(first), out))
    }

    fn derived(&self, start: Period, values: Vec<Option<f64>>, units: String) -> Result<Series> {
        if values.iter().all(Option::is_none) {
            return Err(Error::AllMissing);
        }
        Series::new(self.id.clone(), start, values, units)
    }
}

/// Period-over-period relative change `(x_t - x_{t-1}) / x_{t-1}`.
pub fn growth_rate(s: &Series) -> Result<Series> {
    growth_rate_with_gaps(s).map(|(series, _)| series)
}

/// [`growth_rate`] plus a record of every point that came out missing.
pub fn growth_rate_with_gaps(s: &Series) -> Result<(Series, Vec<Gap>)> {
    if s.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: s.len() });
    }
    let mut gaps = Vec::new();
    let values = s
        .values
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let period = s.period_at(i + 1);
            match (w[0], w[1]) {
                (Some(prev), Some(cur)) if prev != 0.0 => Some((cur - prev) / prev),
                (Some(_), Some(_)) => {
                    gaps.push(Gap { period, reason: GapReason::ZeroDenominator });
                    None
                }
                _ => {
                    gaps.push(Gap { period, reason: GapReason::MissingInput });
                    None
                }
            }
        })
        .collect();
    let out = s.derived(s.period_at(1), values, "rate per period".to_string())?;
    Ok((out, gaps))
}

/// First differences `x_t - x_{t-1}`.
pub fn diff(s: &Series) -> Result<Series> {
    if s.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: s.len() });
    }
    let values = s
        .values
        .windows(2)
        .map(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        })
        .collect();
    s.derived(s.period_at(1), values, s.units.clone())
}

/// Trailing moving average over `window` periods; the first output sits at
/// the end of the first full window.
pub fn moving_average(s: &Series, window: usize) -> Result<Series> {
    if window == 0 {
        return Err(Error::invalid("moving-average window must be at least 1"));
    }
    if window > s.len() {
        return Err(Error::TooShort { needed: window, got: s.len() });
    }
    let values = s
        .values
        .windows(window)
        .map(|w| {
            let mut sum = 0.0;
            for v in w {
                sum += (*v)?;
            }
            Some(sum / window as f64)
        })
        .collect();
    s.derived(s.period_at(window - 1), values, s.units.clone())
}

/// Running sum from `base` onward. A missing input makes every later point
/// missing, since the running total is no longer known.
pub fn cumulative(s: &Series, base: Period) -> Result<Series> {
    let first = s.index_of(&base).ok_or(Error::OutOfSpan(base))?;
    let mut acc = Some(0.0);
    let values = s.values[first..]
        .iter()
        .map(|v| {
            acc = match (acc, v) {
                (Some(a), Some(x)) => Some(a + x),
                _ => None,
            };
            acc
        })
        .collect();
    s.derived(base, values, s.units.clone())
}

/// Reindexes so that `shifted(t) = s(t - lag)`; a negative lag is a lead.
pub fn lag_shift(s: &Series, lag: i64) -> Result<Series> {
    if lag.unsigned_abs() as usize >= s.len() {
        return Err(Error::invalid(format!(
            "lag {lag} must be smaller in magnitude than the series length {}",
            s.len()
        )));
    }
    let mut out = s.clone();
    out.start = s.start.offset(lag);
    Ok(out)
}

/// One aligned observation of two series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub period: Period,
    pub a: f64,
    pub b: f64,
}

/// Pairs the overlapping span of `a` and `b`, dropping periods where either
/// value is missing.
pub fn align(a: &Series, b: &Series) -> Result<Vec<Pair>> {
    if a.frequency() != b.frequency() {
        return Err(Error::FrequencyMismatch);
    }
    let from = a.start.max(b.start);
    let to = a.end().min(b.end());
    if from.steps_to(&to) < 0 {
        return Err(Error::EmptyOverlap);
    }
    let pairs: Vec<Pair> = (0..=from.steps_to(&to))
        .filter_map(|i| {
            let period = from.offset(i);
            Some(Pair { period, a: a.get(&period)?, b: b.get(&period)? })
        })
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    Ok(pairs)
}
