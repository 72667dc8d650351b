//! Cyclic Jacobi eigensolver for small symmetric matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Stop once the off-diagonal Frobenius norm drops below this fraction of `||A||_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 50;

/// Eigenvalues in descending order and the matching orthonormal eigenvectors
/// as columns. Each eigenvector is signed so that its largest-magnitude entry
/// is positive.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "eigendecomposition",
            expected: n,
            found: a.ncols(),
        });
    }
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm();

    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > OFF_DIAGONAL_TOL * scale {
        return Err(Error::NoConvergence("Jacobi eigensolver"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).clone_owned();
        let lead = col
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if lead < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok((values, vectors))
}

fn off_diagonal_norm(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// One rotation in the (p, q) plane zeroing `m[p][q]`.
fn rotate(m: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let n = m.nrows();
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
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_residuals(a: &DMatrix<f64>, vals: &[f64], vecs: &DMatrix<f64>, tol: f64) {
        for (i, &l) in vals.iter().enumerate() {
            let u = vecs.column(i);
            assert!((a * u - l * u).norm() <= tol, "residual for eigenpair {i}");
        }
        let g = vecs.transpose() * vecs;
        assert!((g - DMatrix::identity(a.nrows(), a.nrows())).abs().max() < 1e-13);
    }

    #[test]
    fn identity() {
        let (vals, _) = jacobi_eigen(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        let (vals, vecs) = jacobi_eigen(&a).unwrap();
        assert_eq!(vals, vec![4.0, 1.0]);
        assert_eq!(
            vecs.column(0).iter().copied().collect::<Vec<_>>(),
            vec![0.0, 1.0]
        );
        assert_eq!(
            vecs.column(1).iter().copied().collect::<Vec<_>>(),
            vec![1.0, 0.0]
        );
    }

    #[test]
    fn hand_solved_two_by_two() {
        // characteristic polynomial (2 - l)^2 - 1 = 0
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = jacobi_eigen(&a).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((vecs[(0, 0)] - h).abs() < 1e-12 && (vecs[(1, 0)] - h).abs() < 1e-12);
        assert!((vecs[(0, 1)].abs() - h).abs() < 1e-12);
        assert!((vecs[(0, 1)] + vecs[(1, 1)]).abs() < 1e-12);
    }

    #[test]
    fn hand_solved_three_by_three() {
        // tridiag(-1, 2, -1): eigenvalues 2 - sqrt2, 2, 2 + sqrt2
        let a = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let (vals, vecs) = jacobi_eigen(&a).unwrap();
        let s = 2f64.sqrt();
        for (got, want) in vals.iter().zip([2.0 + s, 2.0, 2.0 - s]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        // middle eigenvector is (1, 0, -1)/sqrt2
        assert!(vecs[(1, 1)].abs() < 1e-12);
        assert!((vecs[(0, 1)].abs() - 1.0 / s).abs() < 1e-12);
        check_residuals(&a, &vals, &vecs, 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let (vals, vecs) = jacobi_eigen(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(vals, vec![0.0; 3]);
        assert_eq!(vecs, DMatrix::identity(3, 3));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn agrees_with_reference_solver(n in 1usize..8, seed in proptest::collection::vec(-5.0f64..5.0, 64)) {
                let b = DMatrix::from_fn(n, n, |i, j| seed[i * 8 + j]);
                let a = &b + b.transpose();
                let (vals, vecs) = jacobi_eigen(&a).unwrap();
                let mut reference: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
                reference.sort_by(|x, y| y.total_cmp(x));
                let scale = a.norm().max(1.0);
                for (x, y) in vals.iter().zip(&reference) {
                    prop_assert!((x - y).abs() <= 1e-12 * scale);
                }
                prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
                for (i, &l) in vals.iter().enumerate() {
                    let u = vecs.column(i);
                    prop_assert!((&a * u - l * u).norm() <= 1e-12 * scale);
                }
            }
        }
    }
}
