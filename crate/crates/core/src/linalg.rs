//! Small dense linear algebra: Householder least squares, Cholesky and the
//! cyclic Jacobi eigensolver for symmetric matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from equal-length columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::invalid("columns have different lengths"));
        }
        let mut m = Matrix::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("rows have different lengths"));
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.iter().flat_map(|r| r.iter().copied()).collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    /// `(A + Aᵀ) / 2`, used to scrub rounding asymmetry.
    pub fn symmetrized(&self) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..i {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// A column whose component orthogonal to the preceding columns is below
/// this fraction of its own norm counts as collinear.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Least-squares solution from a Householder QR factorisation.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Inverse of the triangular factor; `R⁻¹R⁻ᵀ = (XᵀX)⁻¹`.
    pub r_inverse: Matrix,
}

impl LeastSquares {
    /// Diagonal of `(XᵀX)⁻¹`.
    pub fn unscaled_variances(&self) -> Vec<f64> {
        let r = &self.r_inverse;
        (0..r.rows()).map(|i| (i..r.cols()).map(|j| r[(i, j)] * r[(i, j)]).sum()).collect()
    }
}

/// Solves `min ‖y − Xβ‖₂` without forming the normal equations.
pub fn least_squares(x: &Matrix, y: &[f64]) -> Result<LeastSquares> {
    let (n, p) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(Error::invalid("response length differs from design rows"));
    }
    if n < p {
        return Err(Error::TooShort { needed: p, got: n });
    }
    let norms: Vec<f64> = (0..p).map(|j| libm::sqrt((0..n).map(|i| x[(i, j)] * x[(i, j)]).sum())).collect();
    let mut a = x.clone();
    let mut qty = y.to_vec();
    let mut deficient = Vec::new();
    let mut v = vec![0.0; n];
    for k in 0..p {
        let alpha_sq: f64 = (k..n).map(|i| a[(i, k)] * a[(i, k)]).sum();
        let alpha = libm::sqrt(alpha_sq);
        if !(alpha > RANK_TOLERANCE * norms[k]) || norms[k] == 0.0 {
            deficient.push(k);
            continue;
        }
        let sign = if a[(k, k)] >= 0.0 { 1.0 } else { -1.0 };
        for i in k..n {
            v[i] = a[(i, k)];
        }
        v[k] += sign * alpha;
        let vnorm_sq: f64 = (k..n).map(|i| v[i] * v[i]).sum();
        for j in k..p {
            let dot: f64 = (k..n).map(|i| v[i] * a[(i, j)]).sum();
            let f = 2.0 * dot / vnorm_sq;
            for i in k..n {
                a[(i, j)] -= f * v[i];
            }
        }
        let dot: f64 = (k..n).map(|i| v[i] * qty[i]).sum();
        let f = 2.0 * dot / vnorm_sq;
        for i in k..n {
            qty[i] -= f * v[i];
        }
    }
    if !deficient.is_empty() {
        return Err(Error::RankDeficient { columns: deficient });
    }

    let mut r_inverse = Matrix::zeros(p, p);
    for col in 0..p {
        for i in (0..=col).rev() {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for j in i + 1..=col {
                s -= a[(i, j)] * r_inverse[(j, col)];
            }
            r_inverse[(i, col)] = s / a[(i, i)];
        }
    }
    let coefficients: Vec<f64> = (0..p).map(|i| (i..p).map(|j| r_inverse[(i, j)] * qty[j]).sum()).collect();
    let fitted = x.mul_vec(&coefficients);
    let residuals = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    Ok(LeastSquares { coefficients, residuals, r_inverse })
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
///
/// Fails when a pivot drops below `rel_tol` times the largest diagonal entry.
pub fn cholesky(a: &Matrix, rel_tol: f64) -> Option<Matrix> {
    let n = a.rows();
    let scale = (0..n).map(|i| a[(i, i)]).fold(0.0f64, f64::max);
    if !(scale > 0.0) {
        return None;
    }
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let d = a[(j, j)] - (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum::<f64>();
        if !(d > rel_tol * scale) {
            return None;
        }
        let d = libm::sqrt(d);
        l[(j, j)] = d;
        for i in j + 1..n {
            let s = a[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Solves `L X = B` for lower-triangular `L`.
pub fn solve_lower(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.rows();
    let mut x = Matrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        for i in 0..n {
            let s = b[(i, c)] - (0..i).map(|k| l[(i, k)] * x[(k, c)]).sum::<f64>();
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Solves `A X = B` given the Cholesky factor `L` of `A`.
pub fn cholesky_solve(l: &Matrix, b: &Matrix) -> Matrix {
    let y = solve_lower(l, b);
    let lt = l.transpose();
    let n = l.rows();
    let mut x = Matrix::zeros(n, b.cols());
    for c in 0..b.cols() {
        for i in (0..n).rev() {
            let s = y[(i, c)] - (i + 1..n).map(|k| lt[(i, k)] * x[(k, c)]).sum::<f64>();
            x[(i, c)] = s / lt[(i, i)];
        }
    }
    x
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Sorted in descending order.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: Matrix,
}

/// Cyclic Jacobi rotations; accurate to working precision for the small
/// matrices used here.
pub fn symmetric_eigen(a: &Matrix) -> SymmetricEigen {
    let n = a.rows();
    let mut m = a.symmetrized();
    let mut v = Matrix::identity(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[(i, j)] * m[(i, j)]).sum();
        let total: f64 = off + (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum::<f64>();
        if off <= 1e-30 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    SymmetricEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_exact_line() {
        let x = Matrix::from_rows(&[&[1.0, 0.0], &[1.0, 1.0]]).unwrap();
        let fit = least_squares(&x, &[2.0, 5.0]).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-14);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-14);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-14));
    }

    #[test]
    fn least_squares_flags_collinear_column() {
        let x = Matrix::from_columns(&[vec![1.0; 5], vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![1.0, 2.0, 3.0, 4.0, 5.0]])
            .unwrap();
        match least_squares(&x, &[1.0, 2.0, 2.0, 3.0, 5.0]) {
            Err(Error::RankDeficient { columns }) => assert_eq!(columns, vec![2]),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
        let zero = Matrix::from_columns(&[vec![1.0; 3], vec![0.0; 3]]).unwrap();
        assert!(matches!(least_squares(&zero, &[1.0, 2.0, 3.0]), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn cholesky_roundtrip_and_singular() {
        let a = Matrix::from_rows(&[&[4.0, 2.0], &[2.0, 3.0]]).unwrap();
        let l = cholesky(&a, 1e-12).unwrap();
        let back = l.matmul(&l.transpose());
        for i in 0..2 {
            for j in 0..2 {
                assert!((back[(i, j)] - a[(i, j)]).abs() < 1e-14);
            }
        }
        let x = cholesky_solve(&l, &Matrix::identity(2));
        let id = a.matmul(&x);
        assert!((id[(0, 0)] - 1.0).abs() < 1e-14 && id[(0, 1)].abs() < 1e-14);
        let s = Matrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert!(cholesky(&s, 1e-12).is_none());
    }

    #[test]
    fn jacobi_matches_closed_form_2x2() {
        let a = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let e = symmetric_eigen(&a);
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let v0 = e.vectors.column(0);
        assert!((v0[0].abs() - libm::sqrt(0.5)).abs() < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_3x3() {
        let a = Matrix::from_rows(&[&[4.0, 1.0, -2.0], &[1.0, 2.0, 0.5], &[-2.0, 0.5, 3.0]]).unwrap();
        let e = symmetric_eigen(&a);
        let mut d = Matrix::zeros(3, 3);
        for i in 0..3 {
            d[(i, i)] = e.values[i];
        }
        let back = e.vectors.matmul(&d).matmul(&e.vectors.transpose());
        for i in 0..3 {
            for j in 0..3 {
                assert!((back[(i, j)] - a[(i, j)]).abs() < 1e-12);
            }
        }
        let trace: f64 = e.values.iter().sum();
        assert!((trace - 9.0).abs() < 1e-12);
    }
}
