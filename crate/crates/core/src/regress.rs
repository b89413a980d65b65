//! Ordinary least squares and the Newey–West long-run variance.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub nobs: usize,
}

impl OlsFit {
    /// Residual variance with the degrees-of-freedom correction, `rss / (n − k)`.
    pub fn sigma2(&self) -> f64 {
        self.rss / (self.nobs - self.coefficients.len()) as f64
    }
}

/// Regresses `y` on the columns of `x`.
///
/// A perfect fit yields zero standard errors and infinite t-statistics.
pub fn ols(y: &[f64], x: &Matrix) -> Result<OlsFit> {
    let (n, k) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(Error::invalid("response length differs from design rows"));
    }
    if n <= k {
        return Err(Error::TooShort { needed: k + 1, got: n });
    }
    let ls = least_squares(x, y)?;
    let rss: f64 = ls.residuals.iter().map(|r| r * r).sum();
    let sigma2 = rss / (n - k) as f64;
    let standard_errors: Vec<f64> = ls.unscaled_variances().iter().map(|v| libm::sqrt(sigma2 * v)).collect();
    let t_stats = ls.coefficients.iter().zip(&standard_errors).map(|(b, se)| b / se).collect();
    Ok(OlsFit { coefficients: ls.coefficients, standard_errors, t_stats, residuals: ls.residuals, rss, nobs: n })
}

/// `γ₀ + 2 Σ_{j=1..bandwidth} (1 − j/(bandwidth+1)) γ_j` with uncentered
/// autocovariances `γ_j = (1/n) Σ u_t u_{t−j}`.
pub fn long_run_variance(u: &[f64], bandwidth: usize) -> Result<f64> {
    let n = u.len();
    if bandwidth >= n {
        return Err(Error::invalid("bandwidth must be smaller than the sample size"));
    }
    let gamma = |j: usize| u[j..].iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    let mut lrv = gamma(0);
    for j in 1..=bandwidth {
        let w = 1.0 - j as f64 / (bandwidth as f64 + 1.0);
        lrv += 2.0 * w * gamma(j);
    }
    Ok(lrv.max(0.0))
}

/// `floor(4 · (n/100)^(2/9))`, the usual Newey–West rule of thumb.
pub fn default_bandwidth(n: usize) -> usize {
    libm::floor(4.0 * libm::pow(n as f64 / 100.0, 2.0 / 9.0)) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn intercept_only_is_the_mean() {
        let y = [1.0, 2.0, 4.0, 7.0];
        let fit = ols(&y, &Matrix::from_columns(&[vec![1.0; 4]]).unwrap()).unwrap();
        assert!((fit.coefficients[0] - 3.5).abs() < 1e-14);
        assert_eq!(fit.nobs, 4);
        assert!((fit.sigma2() - fit.rss / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exact_fit_has_zero_residuals() {
        let x = Matrix::from_columns(&[vec![1.0; 3], vec![0.0, 1.0, 2.0]]).unwrap();
        let fit = ols(&[1.0, 3.0, 5.0], &x).unwrap();
        assert!(fit.rss < 1e-28);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-14));
    }

    #[test]
    fn needs_more_rows_than_columns() {
        let x = Matrix::from_columns(&[vec![1.0; 2], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(ols(&[1.0, 2.0], &x), Err(Error::TooShort { .. })));
    }

    #[test]
    fn duplicated_column_is_an_error() {
        let c = vec![0.3, 1.2, 2.2, 2.9, 4.1];
        let x = Matrix::from_columns(&[vec![1.0; 5], c.clone(), c]).unwrap();
        assert_eq!(
            ols(&[1.0, 2.0, 3.0, 4.0, 6.0], &x),
            Err(Error::RankDeficient { columns: vec![2] })
        );
    }

    #[test]
    fn long_run_variance_edge_cases() {
        let u = [0.5, -1.0, 2.0, 0.0];
        let lrv0 = long_run_variance(&u, 0).unwrap();
        assert!((lrv0 - (0.25 + 1.0 + 4.0) / 4.0).abs() < 1e-15);
        assert_eq!(long_run_variance(&[0.0; 6], 2).unwrap(), 0.0);
        assert!(long_run_variance(&u, 4).is_err());
    }

    #[test]
    fn default_bandwidth_values() {
        assert_eq!(default_bandwidth(100), 4);
        assert_eq!(default_bandwidth(44), 3);
        assert_eq!(default_bandwidth(200), 4);
        assert_eq!(default_bandwidth(500), 5);
    }
}
