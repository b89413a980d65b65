//! Residual-based Engle–Granger battery and the Johansen trace test.
//!
//! The Engle–Granger variant here takes the residual of an already
//! calibrated model (observed minus predicted) rather than estimating a
//! static cointegrating regression first.

use alloc::vec;
use alloc::vec::Vec;

use crate::critical::{self, Significance};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, least_squares, solve_lower, symmetric_eigen, Matrix};
use crate::regress::default_bandwidth;
use crate::series::{align, Series};
use crate::unitroot::{self, Deterministic, TestKind, UnitRootResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngleGrangerConfig {
    /// Augmentation lags of the Dickey–Fuller row (0 = plain DF).
    pub adf_lags: usize,
    /// DF-GLS is run at every lag from this value down to 1.
    pub dfgls_max_lag: usize,
    pub deterministic: Deterministic,
    pub dfgls_deterministic: Deterministic,
    /// `None` uses the Newey–West rule of thumb.
    pub pp_bandwidth: Option<usize>,
}

impl Default for EngleGrangerConfig {
    fn default() -> Self {
        EngleGrangerConfig {
            adf_lags: 0,
            dfgls_max_lag: 4,
            deterministic: Deterministic::Constant,
            dfgls_deterministic: Deterministic::ConstantAndTrend,
            pp_bandwidth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngleGrangerReport {
    /// ADF first, then DF-GLS from the largest lag down to 1, then PP.
    pub residual_tests: Vec<UnitRootResult>,
    /// ADF and PP z(t) both reject at 1%.
    pub cointegrated_at_1pct: bool,
}

impl EngleGrangerReport {
    pub fn test(&self, kind: TestKind) -> impl Iterator<Item = &UnitRootResult> {
        self.residual_tests.iter().filter(move |r| r.spec.test == kind)
    }
}

pub const MIN_RESIDUAL_LENGTH: usize = 15;

/// Unit-root battery on a model residual, DF-GLS at lags `lags..=1`.
pub fn engle_granger(residual: &Series, lags: usize) -> Result<EngleGrangerReport> {
    engle_granger_with(residual, &EngleGrangerConfig { dfgls_max_lag: lags, ..EngleGrangerConfig::default() })
}

pub fn engle_granger_with(residual: &Series, config: &EngleGrangerConfig) -> Result<EngleGrangerReport> {
    let (_, u) = residual.contiguous()?;
    if u.len() < MIN_RESIDUAL_LENGTH {
        return Err(Error::TooShort { needed: MIN_RESIDUAL_LENGTH, got: u.len() });
    }
    if u.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateVariance("residual is identically zero (perfect fit)"));
    }
    let mut residual_tests = vec![unitroot::adf(&u, config.deterministic, config.adf_lags)?];
    for lag in (1..=config.dfgls_max_lag).rev() {
        residual_tests.push(unitroot::dfgls(&u, config.dfgls_deterministic, lag)?);
    }
    let bandwidth = config.pp_bandwidth.unwrap_or_else(|| default_bandwidth(u.len() - 1));
    let pp = unitroot::pp(&u, config.deterministic, bandwidth)?;
    let cointegrated_at_1pct = residual_tests[0].reject_at(Significance::One) && pp.reject_at(Significance::One);
    residual_tests.push(pp);
    Ok(EngleGrangerReport { residual_tests, cointegrated_at_1pct })
}

/// Deterministic specification of the Johansen VECM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum JohansenTrend {
    /// No deterministic terms.
    None,
    /// Constant restricted to the cointegrating space.
    RConstant,
}

impl JohansenTrend {
    pub fn label(self) -> &'static str {
        match self {
            JohansenTrend::None => "none",
            JohansenTrend::RConstant => "rconstant",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub rank: usize,
    pub log_likelihood: f64,
    /// λ_rank; `None` for rank 0.
    pub eigenvalue: Option<f64>,
    /// `None` for the full-rank row.
    pub trace_stat: Option<f64>,
    pub critical_5pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JohansenReport {
    pub trend: JohansenTrend,
    pub max_lag: usize,
    pub nobs: usize,
    /// Descending, one per series.
    pub eigenvalues: Vec<f64>,
    pub rows: Vec<RankRow>,
    /// First rank whose trace statistic is below its 5% critical value.
    pub selected_rank: usize,
    pub notes: Vec<&'static str>,
}

/// Near-singularity threshold for the moment matrices, relative to their
/// largest diagonal entry.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

pub const RCONSTANT_NOTE: &str =
    "rank-0 5% critical for rconstant is 19.96 (standard table); some printed tables show 12.53 for both specifications";

/// Johansen trace test on aligned series (periods where any is missing are
/// dropped from the common span; interior gaps are an error).
pub fn johansen(ys: &[Series], max_lag: usize, trend: JohansenTrend) -> Result<JohansenReport> {
    if ys.len() < 2 {
        return Err(Error::invalid("Johansen test needs at least two series"));
    }
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(ys.len());
    let pairs = align(&ys[0], &ys[1])?;
    let mut periods: Vec<_> = pairs.iter().map(|p| p.period).collect();
    for s in &ys[2..] {
        if s.frequency() != ys[0].frequency() {
            return Err(Error::FrequencyMismatch);
        }
        periods.retain(|p| s.get(p).is_some());
    }
    if periods.windows(2).any(|w| w[0].steps_to(&w[1]) != 1) {
        return Err(Error::invalid("aligned series have gaps"));
    }
    for s in ys {
        columns.push(periods.iter().map(|p| s.get(p).unwrap_or(0.0)).collect());
    }
    johansen_columns(&columns, max_lag, trend)
}

/// Johansen trace test on equal-length gap-free columns.
pub fn johansen_columns(columns: &[Vec<f64>], max_lag: usize, trend: JohansenTrend) -> Result<JohansenReport> {
    let k = columns.len();
    let n = columns.first().map_or(0, Vec::len);
    if max_lag == 0 {
        return Err(Error::invalid("max_lag must be at least 1"));
    }
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::invalid("series have different lengths"));
    }
    if n < 10 + max_lag {
        return Err(Error::TooShort { needed: 10 + max_lag, got: n });
    }
    let t_obs = n - max_lag;
    let rows = max_lag..n;
    let diff = |c: &Vec<f64>, t: usize| c[t] - c[t - 1];

    let z0: Vec<Vec<f64>> = columns.iter().map(|c| rows.clone().map(|t| diff(c, t)).collect()).collect();
    let mut z1: Vec<Vec<f64>> = columns.iter().map(|c| rows.clone().map(|t| c[t - 1]).collect()).collect();
    if trend == JohansenTrend::RConstant {
        z1.push(vec![1.0; t_obs]);
    }
    let mut z2: Vec<Vec<f64>> = Vec::new();
    for lag in 1..max_lag {
        for c in columns {
            z2.push(rows.clone().map(|t| diff(c, t - lag)).collect());
        }
    }

    let partial = |z: Vec<Vec<f64>>| -> Result<Vec<Vec<f64>>> {
        if z2.is_empty() {
            return Ok(z);
        }
        let x = Matrix::from_columns(&z2)?;
        z.iter()
            .map(|col| match least_squares(&x, col) {
                Ok(ls) => Ok(ls.residuals),
                Err(Error::RankDeficient { .. }) => Err(Error::Singular("lagged differences are collinear")),
                Err(e) => Err(e),
            })
            .collect()
    };
    let r0 = partial(z0)?;
    let r1 = partial(z1)?;

    let moment = |a: &[Vec<f64>], b: &[Vec<f64>]| -> Matrix {
        let mut m = Matrix::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai.iter().zip(bj).map(|(x, y)| x * y).sum::<f64>() / t_obs as f64;
            }
        }
        m
    };
    let s00 = moment(&r0, &r0);
    let s01 = moment(&r0, &r1);
    let s11 = moment(&r1, &r1);

    let l00 = cholesky(&s00, SINGULARITY_THRESHOLD).ok_or(Error::Singular("S00"))?;
    let l11 = cholesky(&s11, SINGULARITY_THRESHOLD).ok_or(Error::Singular("S11"))?;

    // L11⁻¹ S10 S00⁻¹ S01 L11⁻ᵀ is symmetric with the generalized eigenvalues.
    let a = s01.transpose().matmul(&cholesky_solve(&l00, &s01));
    let left = solve_lower(&l11, &a);
    let c = solve_lower(&l11, &left.transpose()).symmetrized();
    let eig = symmetric_eigen(&c);

    let mut eigenvalues = Vec::with_capacity(k);
    for &lambda in eig.values.iter().take(k) {
        if !(lambda < 1.0) {
            return Err(Error::Numeric("eigenvalue not below one"));
        }
        eigenvalues.push(lambda.max(0.0));
    }

    let log_det_s00: f64 = 2.0 * (0..k).map(|i| libm::log(l00[(i, i)])).sum::<f64>();
    let t = t_obs as f64;
    let base_ll = -0.5 * t * (k as f64 * (libm::log(2.0 * core::f64::consts::PI) + 1.0) + log_det_s00);
    let log_terms: Vec<f64> = eigenvalues.iter().map(|l| libm::log(1.0 - l)).collect();

    let mut report_rows = Vec::with_capacity(k + 1);
    let mut selected_rank = None;
    for r in 0..=k {
        let log_likelihood = base_ll - 0.5 * t * log_terms[..r].iter().sum::<f64>();
        let (trace_stat, critical_5pct) = if r < k {
            let stat = -t * log_terms[r..].iter().sum::<f64>();
            (Some(stat), critical::johansen_trace_5pct(trend == JohansenTrend::RConstant, k - r))
        } else {
            (None, None)
        };
        if selected_rank.is_none() {
            match (trace_stat, critical_5pct) {
                (Some(s), Some(cv)) if s < cv => selected_rank = Some(r),
                (None, _) => selected_rank = Some(r),
                _ => {}
            }
        }
        report_rows.push(RankRow {
            rank: r,
            log_likelihood,
            eigenvalue: r.checked_sub(1).map(|i| eigenvalues[i]),
            trace_stat,
            critical_5pct,
        });
    }

    let mut notes = Vec::new();
    if trend == JohansenTrend::RConstant {
        notes.push(RCONSTANT_NOTE);
    }
    Ok(JohansenReport {
        trend,
        max_lag,
        nobs: t_obs,
        eigenvalues,
        rows: report_rows,
        selected_rank: selected_rank.unwrap_or(k),
        notes,
    })
}
