//! Augmented Dickey–Fuller, DF-GLS and Phillips–Perron unit-root tests.
//!
//! All three are left-tailed: the unit-root null is rejected when the
//! statistic falls below the critical value. Lag orders are always supplied
//! by the caller.

use alloc::vec;
use alloc::vec::Vec;

use crate::critical::{self, CriticalValues, DfCase, Significance};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::regress::{long_run_variance, ols, OlsFit};
use crate::series::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TestKind {
    Adf,
    DfGls,
    Pp,
}

impl TestKind {
    pub fn label(self) -> &'static str {
        match self {
            TestKind::Adf => "ADF",
            TestKind::DfGls => "DF-GLS",
            TestKind::Pp => "PP",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Deterministic {
    Constant,
    ConstantAndTrend,
}

impl Deterministic {
    fn df_case(self) -> DfCase {
        match self {
            Deterministic::Constant => DfCase::Constant,
            Deterministic::ConstantAndTrend => DfCase::ConstantAndTrend,
        }
    }
}

/// Which test to run. `lags` is the number of lagged differences for ADF and
/// DF-GLS and the Newey–West bandwidth for PP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitRootSpec {
    pub test: TestKind,
    pub deterministic: Deterministic,
    pub lags: usize,
}

impl UnitRootSpec {
    pub fn adf(deterministic: Deterministic, lags: usize) -> Self {
        UnitRootSpec { test: TestKind::Adf, deterministic, lags }
    }

    pub fn dfgls(deterministic: Deterministic, lags: usize) -> Self {
        UnitRootSpec { test: TestKind::DfGls, deterministic, lags }
    }

    pub fn pp(deterministic: Deterministic, bandwidth: usize) -> Self {
        UnitRootSpec { test: TestKind::Pp, deterministic, lags: bandwidth }
    }
}

/// Default augmentation lags: two for annual data, four for quarterly.
pub fn default_lags(frequency: crate::Frequency) -> usize {
    match frequency {
        crate::Frequency::Annual => 2,
        crate::Frequency::Quarterly => 4,
    }
}

/// A test statistic with its critical values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Statistic {
    pub value: f64,
    pub critical: CriticalValues,
}

impl Statistic {
    pub fn rejects(&self, level: Significance) -> bool {
        self.value < self.critical.at(level)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitRootResult {
    pub spec: UnitRootSpec,
    /// The τ-type statistic: the ADF / DF-GLS t-ratio, or PP z(t).
    pub statistic: Statistic,
    /// PP z(ρ); `None` for the other tests.
    pub z_rho: Option<Statistic>,
    /// Observations in the test regression.
    pub nobs: usize,
}

impl UnitRootResult {
    /// Decision of the τ-type statistic at `level`.
    pub fn reject_at(&self, level: Significance) -> bool {
        self.statistic.rejects(level)
    }
}

fn check_length(x: &[f64], needed: usize) -> Result<()> {
    if x.len() < needed {
        return Err(Error::TooShort { needed, got: x.len() });
    }
    let first = x[0];
    if x.iter().all(|&v| v == first) {
        return Err(Error::DegenerateVariance("series is constant"));
    }
    Ok(())
}

/// Dickey–Fuller regression of `Δx_t` on `x_{t−1}`, deterministic terms and
/// `lags` lagged differences. The level coefficient is column 0.
fn df_regression(x: &[f64], case: DfCase, lags: usize) -> Result<OlsFit> {
    let n = x.len();
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    // dx[i] is Δx at time i+1; usable rows start once `lags` prior differences exist.
    let rows = lags..dx.len();
    let nobs = rows.len();
    if nobs == 0 {
        return Err(Error::TooShort { needed: lags + 2, got: n });
    }
    let y: Vec<f64> = rows.clone().map(|i| dx[i]).collect();
    let mut columns = vec![rows.clone().map(|i| x[i]).collect::<Vec<f64>>()];
    if case != DfCase::NoConstant {
        columns.push(vec![1.0; nobs]);
    }
    if case == DfCase::ConstantAndTrend {
        columns.push(rows.clone().map(|i| (i + 1) as f64).collect());
    }
    for j in 1..=lags {
        columns.push(rows.clone().map(|i| dx[i - j]).collect());
    }
    ols(&y, &Matrix::from_columns(&columns)?)
}

/// ADF test on a gap-free slice.
pub fn adf(x: &[f64], deterministic: Deterministic, lags: usize) -> Result<UnitRootResult> {
    check_length(x, lags + 10)?;
    let case = deterministic.df_case();
    let fit = df_regression(x, case, lags)?;
    Ok(UnitRootResult {
        spec: UnitRootSpec::adf(deterministic, lags),
        statistic: Statistic { value: fit.t_stats[0], critical: critical::df_tau(case, fit.nobs) },
        z_rho: None,
        nobs: fit.nobs,
    })
}

/// Local-to-unity parameter for GLS detrending.
fn cbar(deterministic: Deterministic) -> f64 {
    match deterministic {
        Deterministic::Constant => -7.0,
        Deterministic::ConstantAndTrend => -13.5,
    }
}

/// GLS-detrended series: quasi-difference at `1 + c̄/T`, regress, and
/// subtract the fitted deterministic component from the original series.
pub fn gls_detrend(x: &[f64], deterministic: Deterministic) -> Result<Vec<f64>> {
    let n = x.len();
    let a = 1.0 + cbar(deterministic) / n as f64;
    let trend = deterministic == Deterministic::ConstantAndTrend;
    let z = |t: usize| -> [f64; 2] { [1.0, (t + 1) as f64] };
    let quasi = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..n).map(|t| if t == 0 { f(0) } else { f(t) - a * f(t - 1) }).collect()
    };
    let yq = quasi(&|t| x[t]);
    let mut columns = vec![quasi(&|t| z(t)[0])];
    if trend {
        columns.push(quasi(&|t| z(t)[1]));
    }
    let ls = crate::linalg::least_squares(&Matrix::from_columns(&columns)?, &yq)?;
    let beta = ls.coefficients;
    Ok((0..n)
        .map(|t| {
            let zt = z(t);
            let det = beta[0] * zt[0] + if trend { beta[1] * zt[1] } else { 0.0 };
            x[t] - det
        })
        .collect())
}

/// DF-GLS (Elliott–Rothenberg–Stock) test on a gap-free slice.
pub fn dfgls(x: &[f64], deterministic: Deterministic, lags: usize) -> Result<UnitRootResult> {
    check_length(x, lags + 10)?;
    let detrended = gls_detrend(x, deterministic)?;
    let fit = df_regression(&detrended, DfCase::NoConstant, lags)?;
    Ok(UnitRootResult {
        spec: UnitRootSpec::dfgls(deterministic, lags),
        statistic: Statistic {
            value: fit.t_stats[0],
            critical: critical::dfgls(deterministic == Deterministic::ConstantAndTrend, fit.nobs),
        },
        z_rho: None,
        nobs: fit.nobs,
    })
}

/// Phillips–Perron z(ρ) and z(t) with a Bartlett-kernel long-run variance.
pub fn pp(x: &[f64], deterministic: Deterministic, bandwidth: usize) -> Result<UnitRootResult> {
    check_length(x, 15.max(bandwidth + 2))?;
    let case = deterministic.df_case();
    let fit = df_regression(x, case, 0)?;
    let t = fit.nobs as f64;
    let gamma = fit.coefficients[0];
    let se = fit.standard_errors[0];
    let s2 = fit.sigma2();
    let gamma0 = fit.rss / t;
    let lambda2 = long_run_variance(&fit.residuals, bandwidth)?;
    if !(lambda2 > 0.0) || !(s2 > 0.0) {
        return Err(Error::DegenerateVariance("regression residuals are identically zero"));
    }
    let excess = lambda2 - gamma0;
    let z_rho = t * gamma - 0.5 * (t * t * se * se / s2) * excess;
    let z_tau = libm::sqrt(gamma0 / lambda2) * (gamma / se) - 0.5 * excess / libm::sqrt(lambda2) * (t * se / libm::sqrt(s2));
    Ok(UnitRootResult {
        spec: UnitRootSpec::pp(deterministic, bandwidth),
        statistic: Statistic { value: z_tau, critical: critical::df_tau(case, fit.nobs) },
        z_rho: Some(Statistic { value: z_rho, critical: critical::df_rho(case, fit.nobs) }),
        nobs: fit.nobs,
    })
}

/// Runs `spec` on a slice.
pub fn run(x: &[f64], spec: &UnitRootSpec) -> Result<UnitRootResult> {
    match spec.test {
        TestKind::Adf => adf(x, spec.deterministic, spec.lags),
        TestKind::DfGls => dfgls(x, spec.deterministic, spec.lags),
        TestKind::Pp => pp(x, spec.deterministic, spec.lags),
    }
}

/// ADF on a series; leading and trailing missing values are trimmed, interior
/// gaps are an error.
pub fn adf_test(s: &Series, spec: &UnitRootSpec) -> Result<UnitRootResult> {
    adf(&s.contiguous()?.1, spec.deterministic, spec.lags)
}

pub fn dfgls_test(s: &Series, spec: &UnitRootSpec) -> Result<UnitRootResult> {
    dfgls(&s.contiguous()?.1, spec.deterministic, spec.lags)
}

pub fn pp_test(s: &Series, spec: &UnitRootSpec) -> Result<UnitRootResult> {
    pp(&s.contiguous()?.1, spec.deterministic, spec.lags)
}

/// Dispatches on `spec.test`.
pub fn unit_root_test(s: &Series, spec: &UnitRootSpec) -> Result<UnitRootResult> {
    run(&s.contiguous()?.1, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wiggle(n: usize) -> Vec<f64> {
        // Deterministic, strongly mean-reverting sequence.
        let mut x = vec![0.0; n];
        let mut state: u64 = 0x2545F4914F6CDD1D;
        for t in 1..n {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let e = (state % 10_000) as f64 / 10_000.0 - 0.5;
            x[t] = 0.2 * x[t - 1] + e;
        }
        x
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert_eq!(adf(&[1.0; 30], Deterministic::Constant, 0).unwrap_err(), Error::DegenerateVariance("series is constant"));
        assert!(pp(&[0.0; 30], Deterministic::Constant, 2).is_err());
    }

    #[test]
    fn too_short_is_an_error() {
        assert!(matches!(adf(&wiggle(11), Deterministic::Constant, 2), Err(Error::TooShort { needed: 12, .. })));
        assert!(matches!(pp(&wiggle(14), Deterministic::Constant, 2), Err(Error::TooShort { .. })));
    }

    #[test]
    fn nobs_accounts_for_differencing_and_lags() {
        let x = wiggle(50);
        assert_eq!(adf(&x, Deterministic::Constant, 0).unwrap().nobs, 49);
        assert_eq!(adf(&x, Deterministic::Constant, 3).unwrap().nobs, 46);
        assert_eq!(pp(&x, Deterministic::Constant, 3).unwrap().nobs, 49);
    }

    #[test]
    fn pp_with_zero_bandwidth_equals_df_t() {
        // Bandwidth 0 makes λ² = γ₀, so both correction terms vanish.
        let x = wiggle(200);
        let df = adf(&x, Deterministic::Constant, 0).unwrap();
        let p = pp(&x, Deterministic::Constant, 0).unwrap();
        assert!((p.statistic.value - df.statistic.value).abs() < 1e-12);
        let z_rho = p.z_rho.unwrap().value;
        let rho_minus_one = z_rho / p.nobs as f64;
        assert!(rho_minus_one < 0.0 && rho_minus_one > -1.5);
    }

    #[test]
    fn trend_case_uses_trend_tables() {
        let x = wiggle(100);
        let r = adf(&x, Deterministic::ConstantAndTrend, 1).unwrap();
        assert!(r.statistic.critical.one < -3.9);
        let g = dfgls(&x, Deterministic::ConstantAndTrend, 1).unwrap();
        assert!((g.statistic.critical.one - critical::dfgls(true, g.nobs).one).abs() < 1e-15);
    }

    #[test]
    fn gls_detrend_removes_exact_trend() {
        let x: Vec<f64> = (0..60).map(|t| 3.0 + 0.5 * t as f64).collect();
        let d = gls_detrend(&x, Deterministic::ConstantAndTrend).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-9));
    }
}
