//! Active subspaces from quadrature-averaged gradient outer products.
//!
//! `C = E[grad f grad f^T]` under the grid's uniform density. Its leading
//! eigenvectors span the directions along which `f` varies most on average.
//!
//! Accumulation is split into fixed-size chunks of grid points. Each chunk is
//! summed sequentially and chunk totals are combined in chunk order, so the
//! result is bit-identical for any thread count.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::jacobi_eigen;
use crate::error::{Error, Result};
use crate::linalg::gram_deviation;
use crate::quadrature::TensorGrid;

/// Grid points per accumulation chunk.
pub const CHUNK: usize = 1024;
pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DEFAULT_QUAD_ORDER: usize = 11;
/// Eigenvalues above `-NEG_CLAMP * lambda_1` are rounding noise.
pub const NEG_CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GradientConfig {
    /// Absolute forward-difference step in the model's input coordinates.
    pub step: f64,
}

impl GradientConfig {
    pub fn new(step: f64) -> Result<Self> {
        if step > 0.0 && step.is_finite() {
            Ok(Self { step })
        } else {
            Err(Error::InvalidArgument(format!(
                "finite-difference step must be positive, got {step}"
            )))
        }
    }
}

impl Default for GradientConfig {
    fn default() -> Self {
        Self {
            step: DEFAULT_FD_STEP,
        }
    }
}

fn checked<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            point: x.to_vec(),
            value: v,
        })
    }
}

/// Forward differences: `(f(x + h e_i) - f(x)) / h`.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(
    f: &F,
    x: &[f64],
    cfg: &GradientConfig,
) -> Result<Vec<f64>> {
    let f0 = checked(f, x)?;
    let mut xp = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        xp[i] = x[i] + cfg.step;
        g.push((checked(f, &xp)? - f0) / cfg.step);
        xp[i] = x[i];
    }
    Ok(g)
}

/// Threads used for accumulation; `None` lets rayon decide.
#[derive(Clone, Copy, Debug, Default)]
pub struct Parallelism(pub Option<usize>);

/// `C` by forward-difference gradients of `f` at every grid point.
pub fn estimate_c<F>(
    f: &F,
    grid: &TensorGrid,
    cfg: &GradientConfig,
    par: Parallelism,
) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    estimate_c_with(|x: &[f64]| fd_gradient(f, x, cfg), grid, par)
}

/// `C` from any gradient source, e.g. analytic gradients.
pub fn estimate_c_with<G>(gradient: G, grid: &TensorGrid, par: Parallelism) -> Result<DMatrix<f64>>
where
    G: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    accumulate(gradient, grid, grid.dim(), par)
}

/// Weighted sum of `g g^T` over the grid for gradients of length `m`.
fn accumulate<G>(gradient: G, grid: &TensorGrid, m: usize, par: Parallelism) -> Result<DMatrix<f64>>
where
    G: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let tri = m * (m + 1) / 2;
    let chunks = grid.len().div_ceil(CHUNK);

    let chunk_sum = |c: usize| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; tri];
        let mut x = vec![0.0; grid.dim()];
        for idx in c * CHUNK..((c + 1) * CHUNK).min(grid.len()) {
            let w = grid.point_into(idx, &mut x);
            let g = gradient(&x)?;
            if g.len() != m {
                return Err(Error::DimensionMismatch {
                    what: "gradient",
                    expected: m,
                    found: g.len(),
                });
            }
            let mut k = 0;
            for i in 0..m {
                let wgi = w * g[i];
                for gj in &g[..=i] {
                    acc[k] += wgi * gj;
                    k += 1;
                }
            }
        }
        Ok(acc)
    };

    let partials: Vec<Result<Vec<f64>>> = match par.0 {
        Some(1) => (0..chunks).map(chunk_sum).collect(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| (0..chunks).into_par_iter().map(chunk_sum).collect()),
        None => (0..chunks).into_par_iter().map(chunk_sum).collect(),
    };

    let mut total = vec![0.0; tri];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p?) {
            *t += v;
        }
    }
    let mut c = DMatrix::zeros(m, m);
    let mut k = 0;
    for i in 0..m {
        for j in 0..=i {
            c[(i, j)] = total[k];
            c[(j, i)] = total[k];
            k += 1;
        }
    }
    Ok(c)
}

/// Where an estimate came from.
#[derive(Clone, Debug, Default, Serialize)]
pub struct GridMeta {
    pub quad_order: usize,
    pub fd_step: f64,
    pub points: usize,
}

#[derive(Clone, Debug)]
pub struct SubspaceEstimate {
    /// Descending, non-negative.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal, column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
    /// Set when tiny negative eigenvalues were reported as zero.
    pub clamped: bool,
    pub grid_meta: GridMeta,
}

impl SubspaceEstimate {
    pub fn ratios(&self) -> Vec<f64> {
        let top = self.eigenvalues[0];
        self.eigenvalues
            .iter()
            .map(|l| if top > 0.0 { l / top } else { 0.0 })
            .collect()
    }
}

const SYMMETRY_TOL: f64 = 1e-12;

pub fn eigendecompose(c: &DMatrix<f64>) -> Result<SubspaceEstimate> {
    let scale = c.abs().max();
    let asym = (c - c.transpose()).abs().max();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::Asymmetric(if scale > 0.0 {
            asym / scale
        } else {
            asym
        }));
    }
    let (mut eigenvalues, eigenvectors) = jacobi_eigen(c)?;
    let top = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let mut clamped = false;
    for l in eigenvalues.iter_mut() {
        if *l < 0.0 {
            if *l < -NEG_CLAMP * top {
                return Err(Error::NegativeEigenvalue { value: *l, top });
            }
            *l = 0.0;
            clamped = true;
        }
    }
    Ok(SubspaceEstimate {
        eigenvalues,
        eigenvectors,
        clamped,
        grid_meta: GridMeta::default(),
    })
}

/// First `k` eigenvectors; requires a strict spectral gap after `lambda_k`.
pub fn active_subspace(est: &SubspaceEstimate, k: usize) -> Result<DMatrix<f64>> {
    let m = est.eigenvalues.len();
    if k == 0 || k >= m {
        return Err(Error::InvalidArgument(format!(
            "active subspace dimension must be in 1..{m}, got {k}"
        )));
    }
    let (lk, lk1) = (est.eigenvalues[k - 1], est.eigenvalues[k]);
    if (lk - lk1).abs() <= NEG_CLAMP * est.eigenvalues[0] {
        return Err(Error::NoSpectralGap { k, lk, lk1 });
    }
    Ok(est.eigenvectors.columns(0, k).clone_owned())
}

/// `T = E[grad g(A^T x) grad g(A^T x)^T]` for a profile `g` of `n` inputs and
/// an `m x n` matrix `A` with orthonormal columns. When `f(x) = g(A^T x)`,
/// `C = A T A^T`, so eigenpairs of `T` lift to those of `C` via `A U_T`.
pub fn pullback_t<G>(
    profile: &G,
    a: &DMatrix<f64>,
    grid: &TensorGrid,
    cfg: &GradientConfig,
    par: Parallelism,
) -> Result<DMatrix<f64>>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let dev = gram_deviation(a);
    if dev > 1e-10 {
        return Err(Error::NotOrthonormal(dev));
    }
    if a.nrows() != grid.dim() {
        return Err(Error::DimensionMismatch {
            what: "pullback_t",
            expected: grid.dim(),
            found: a.nrows(),
        });
    }
    let at = a.transpose();
    let gradient = |x: &[f64]| -> Result<Vec<f64>> {
        let y = &at * nalgebra::DVector::from_column_slice(x);
        fd_gradient(profile, y.as_slice(), cfg)
    };
    accumulate(gradient, grid, a.ncols(), par)
}

/// Builds `C` with a forward-difference step and eigendecomposes it.
pub fn estimate<F>(
    f: &F,
    grid: &TensorGrid,
    cfg: &GradientConfig,
    par: Parallelism,
) -> Result<SubspaceEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let c = estimate_c(f, grid, cfg, par)?;
    let mut est = eigendecompose(&c)?;
    est.grid_meta = GridMeta {
        quad_order: grid.order(),
        fd_step: cfg.step,
        points: grid.len(),
    };
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::tensor_grid;

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = fd_gradient(&|_: &[f64]| 3.5, &[1.0, 2.0], &GradientConfig::default()).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn gradient_of_linear_function_is_exact() {
        // dyadic coefficients and step keep every operation exact
        let a = [0.5, -2.0, 4.0];
        let f = |x: &[f64]| a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();
        let cfg = GradientConfig::new(2f64.powi(-10)).unwrap();
        assert_eq!(
            fd_gradient(&f, &[1.0, 0.25, -3.0], &cfg).unwrap(),
            a.to_vec()
        );
    }

    #[test]
    fn gradient_of_square_has_order_h_error() {
        let g = fd_gradient(
            &|x: &[f64]| x[0] * x[0],
            &[1.0],
            &GradientConfig::new(1e-3).unwrap(),
        )
        .unwrap();
        assert!((g[0] - 2.001).abs() < 1e-12, "{}", g[0]);
    }

    #[test]
    fn non_finite_values_carry_the_point() {
        let f = |x: &[f64]| if x[1] > 1.0 { f64::NAN } else { 0.0 };
        let err = fd_gradient(&f, &[0.0, 1.0], &GradientConfig::new(0.5).unwrap()).unwrap_err();
        match err {
            Error::NonFinite { point, .. } => assert_eq!(point, vec![0.0, 1.5]),
            e => panic!("{e}"),
        }
        assert!(GradientConfig::new(0.0).is_err());
        assert!(GradientConfig::new(-1.0).is_err());
    }

    #[test]
    fn forward_difference_converges_linearly() {
        let f = |x: &[f64]| (x[0] * 1.3).sin() + (x[1] * 0.7).exp();
        let exact = [1.3 * (1.3f64 * 0.4).cos(), 0.7 * (0.7f64 * -0.2).exp()];
        let hs = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let errs: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let g = fd_gradient(&f, &[0.4, -0.2], &GradientConfig::new(h).unwrap()).unwrap();
                ((g[0] - exact[0]).powi(2) + (g[1] - exact[1]).powi(2)).sqrt()
            })
            .collect();
        let slope = crate::subspace::loglog_slope(&hs, &errs, 0.0).unwrap();
        assert!((slope - 1.0).abs() <= 0.15, "slope {slope}");
    }

    #[test]
    fn linear_function_gives_rank_one_c() {
        let a = [0.5, -2.0, 4.0];
        let f = |x: &[f64]| a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();
        let grid = tensor_grid(3, &[(0.0, 1.0), (-1.0, 1.0), (2.0, 3.0)]).unwrap();
        let cfg = GradientConfig::new(2f64.powi(-12)).unwrap();
        let c = estimate_c(&f, &grid, &cfg, Parallelism(Some(1))).unwrap();
        let aat = DMatrix::from_fn(3, 3, |i, j| a[i] * a[j]);
        assert!((c - aat).abs().max() < 1e-12);
    }

    #[test]
    fn sum_of_squares_gives_diagonal_c() {
        let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
        let grid = tensor_grid(5, &[(-1.0, 1.0), (-2.0, 2.0)]).unwrap();
        // analytic gradients isolate the quadrature: E[4 x0 x1] = 0, E[4 x0^2] = 4/3
        let c = estimate_c_with(
            |x: &[f64]| Ok(vec![2.0 * x[0], 2.0 * x[1]]),
            &grid,
            Parallelism(Some(1)),
        )
        .unwrap();
        assert!(c[(0, 1)].abs() < 1e-14);
        assert!((c[(0, 0)] - 4.0 / 3.0).abs() < 1e-13 && (c[(1, 1)] - 16.0 / 3.0).abs() < 1e-13);
        let c = estimate_c(
            &f,
            &grid,
            &GradientConfig::new(1e-6).unwrap(),
            Parallelism(Some(1)),
        )
        .unwrap();
        assert!(c[(0, 1)].abs() < 1e-5, "{}", c[(0, 1)]);
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let f = |x: &[f64]| (x[0] * x[1]).sin() + x[2].exp() * x[1];
        let grid = tensor_grid(9, &[(0.0, 1.0), (-1.0, 1.0), (0.0, 0.5)]).unwrap();
        let cfg = GradientConfig::default();
        let one = estimate_c(&f, &grid, &cfg, Parallelism(Some(1))).unwrap();
        let four = estimate_c(&f, &grid, &cfg, Parallelism(Some(4))).unwrap();
        let auto = estimate_c(&f, &grid, &cfg, Parallelism(None)).unwrap();
        assert_eq!(one.as_slice(), four.as_slice());
        assert_eq!(one.as_slice(), auto.as_slice());
    }

    #[test]
    fn eigendecompose_examples() {
        let e = eigendecompose(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0; 3]);
        let e = eigendecompose(&DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![4.0, 1.0]);
        assert_eq!(active_subspace(&e, 1).unwrap().as_slice(), &[1.0, 0.0]);
        let e = eigendecompose(&DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        assert!((e.eigenvalues[0] - 3.0).abs() < 1e-12 && (e.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!(matches!(
            eigendecompose(&DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0])),
            Err(Error::Asymmetric(_))
        ));
    }

    #[test]
    fn negative_eigenvalues() {
        let tiny = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-14]);
        let e = eigendecompose(&tiny).unwrap();
        assert!(e.clamped);
        assert_eq!(e.eigenvalues[1], 0.0);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-3]);
        assert!(matches!(
            eigendecompose(&bad),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn spectral_gap_required() {
        let e = eigendecompose(&DMatrix::identity(3, 3)).unwrap();
        assert!(matches!(
            active_subspace(&e, 1),
            Err(Error::NoSpectralGap { .. })
        ));
        assert!(active_subspace(&e, 0).is_err());
        assert!(active_subspace(&e, 3).is_err());
    }

    #[test]
    fn pullback_of_linear_profile_is_rank_one() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let grid = tensor_grid(3, &[(0.0, 1.0); 3]).unwrap();
        let g = |y: &[f64]| 2.0 * y[0] - y[1];
        let t = pullback_t(
            &g,
            &a,
            &grid,
            &GradientConfig::default(),
            Parallelism(Some(1)),
        )
        .unwrap();
        let est = eigendecompose(&t).unwrap();
        assert!(est.eigenvalues[1] <= 1e-12 * est.eigenvalues[0]);
        assert!((est.eigenvalues[0] - 5.0).abs() < 1e-8);
    }

    #[test]
    fn pullback_one_dimensional_matches_c() {
        let s = 1.0 / 3f64.sqrt();
        let a = DMatrix::from_column_slice(3, 1, &[s, s, s]);
        let grid = tensor_grid(5, &[(0.0, 1.0), (-0.5, 0.5), (0.2, 0.4)]).unwrap();
        let g = |y: &[f64]| (1.5 * y[0]).sin();
        let f = |x: &[f64]| g(&[s * (x[0] + x[1] + x[2])]);
        let cfg = GradientConfig::new(1e-7).unwrap();
        let t = pullback_t(&g, &a, &grid, &cfg, Parallelism(Some(1))).unwrap();
        let c = estimate(&f, &grid, &cfg, Parallelism(Some(1))).unwrap();
        // both are first-order accurate in h, so compare at O(h)
        assert!((t[(0, 0)] - c.eigenvalues[0]).abs() <= 1e-5 * c.eigenvalues[0]);
    }

    #[test]
    fn pullback_rejects_non_orthonormal() {
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let grid = tensor_grid(2, &[(0.0, 1.0); 2]).unwrap();
        let err = pullback_t(
            &|y: &[f64]| y[0],
            &a,
            &grid,
            &GradientConfig::default(),
            Parallelism(Some(1)),
        );
        assert!(matches!(err, Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn ridge_eigenvectors_lie_in_span() {
        // f = g(A^T x) with n = 2 in m = 4
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, -1.0, 2.0, 0.5]);
        let grid = tensor_grid(4, &[(-0.5, 0.5); 4]).unwrap();
        let at = a.transpose();
        let grad = |x: &[f64]| -> Result<Vec<f64>> {
            let y = &at * nalgebra::DVector::from_column_slice(x);
            let dg =
                nalgebra::DVector::from_vec(vec![y[0].cos() * y[1].exp(), y[0].sin() * y[1].exp()]);
            Ok((&a * dg).iter().copied().collect())
        };
        let c = estimate_c_with(grad, &grid, Parallelism(Some(1))).unwrap();
        let est = eigendecompose(&c).unwrap();
        assert!(est.eigenvalues[2] <= 1e-13 * est.eigenvalues[0]);
        let u = active_subspace(&est, 2).unwrap();
        let r = crate::subspace::inclusion_residual(&u, &a).unwrap();
        assert!(r.total < 1e-24, "{}", r.total);
    }
}
