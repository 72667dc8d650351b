//! Householder QR for the small dense matrices used throughout the crate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Thin Householder QR factorization `A = Q R` of an `m x n` matrix, `m >= n`.
#[derive(Clone, Debug)]
pub struct Qr {
    /// `m x n`, orthonormal columns.
    pub q: DMatrix<f64>,
    /// `n x n`, upper triangular.
    pub r: DMatrix<f64>,
}

impl Qr {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let (m, n) = a.shape();
        if n > m {
            return Err(Error::DimensionMismatch {
                what: "QR (more columns than rows)",
                expected: m,
                found: n,
            });
        }
        let mut r = a.clone();
        let mut reflectors: Vec<DVector<f64>> = Vec::with_capacity(n);
        for k in 0..n {
            let x = r.view((k, k), (m - k, 1)).clone_owned();
            let norm = x.norm();
            let mut v = DVector::from_iterator(m - k, x.iter().copied());
            if norm > 0.0 {
                let alpha = if x[0] >= 0.0 { -norm } else { norm };
                v[0] -= alpha;
                let vn = v.norm();
                if vn > 0.0 {
                    v /= vn;
                }
            } else {
                v.fill(0.0);
            }
            // R[k.., k..] -= 2 v (v^T R[k.., k..])
            let mut block = r.view_mut((k, k), (m - k, n - k));
            let vt_block = v.transpose() * &block;
            block -= 2.0 * &v * vt_block;
            reflectors.push(v);
        }
        // accumulate thin Q by applying reflectors to the first n columns of I
        let mut q = DMatrix::<f64>::identity(m, n);
        for k in (0..n).rev() {
            let v = &reflectors[k];
            let mut block = q.view_mut((k, 0), (m - k, n));
            let vt_block = v.transpose() * &block;
            block -= 2.0 * v * vt_block;
        }
        let mut r = r.rows(0, n).upper_triangle();
        // sign convention: nonnegative diagonal of R
        for k in 0..n {
            if r[(k, k)] < 0.0 {
                r.row_mut(k).neg_mut();
                q.column_mut(k).neg_mut();
            }
        }
        Ok(Self { q, r })
    }

    /// Numerical rank from the diagonal of `R` at relative tolerance `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        let d = self.diag_abs();
        let top = d.iter().copied().fold(0.0, f64::max);
        d.iter().filter(|&&x| x > tol * top).count()
    }

    /// Ratio of the largest to smallest `|R_kk|`; a cheap condition estimate.
    pub fn condition_estimate(&self) -> f64 {
        let d = self.diag_abs();
        let top = d.iter().copied().fold(0.0, f64::max);
        let bot = d.iter().copied().fold(f64::INFINITY, f64::min);
        if d.is_empty() {
            1.0
        } else {
            top / bot
        }
    }

    /// Least-squares solution of `min ||A a - b||` by back-substitution on `R`.
    pub fn solve_least_squares(&self, b: &DVector<f64>) -> DVector<f64> {
        let qtb = self.q.transpose() * b;
        let n = self.r.ncols();
        let mut a = DVector::zeros(n);
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.r[(i, j)] * a[j]).sum();
            a[i] = (qtb[i] - s) / self.r[(i, i)];
        }
        a
    }

    fn diag_abs(&self) -> Vec<f64> {
        (0..self.r.ncols()).map(|k| self.r[(k, k)].abs()).collect()
    }
}

/// Relative tolerance below which a diagonal entry of `R` counts as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Orthonormal basis for the column space of a full-column-rank matrix.
pub fn orthonormalize(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let qr = Qr::new(a)?;
    if qr.rank(RANK_TOL) < a.ncols() {
        return Err(Error::RankDeficient(format!(
            "{}x{} basis",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(qr.q)
}

/// Largest entrywise deviation of `A^T A` from the identity.
pub fn gram_deviation(a: &DMatrix<f64>) -> f64 {
    let g = a.transpose() * a;
    let n = g.nrows();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_reconstructs() {
        let a = DMatrix::from_row_slice(
            4,
            3,
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.5, 7.0, 8.0, 10.0, -1.0, 0.5, 2.0],
        );
        let qr = Qr::new(&a).unwrap();
        assert!((&qr.q * &qr.r - &a).abs().max() < 1e-13);
        assert!(gram_deviation(&qr.q) < 1e-14);
        assert_eq!(qr.rank(RANK_TOL), 3);
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 2.0, 4.0]);
        let x = Qr::new(&a).unwrap().solve_least_squares(&b);
        let ne = (a.transpose() * &a).try_inverse().unwrap() * a.transpose() * &b;
        assert!((x - ne).abs().max() < 1e-13);
    }

    #[test]
    fn rank_deficiency_detected() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert!(matches!(orthonormalize(&a), Err(Error::RankDeficient(_))));
    }
}
