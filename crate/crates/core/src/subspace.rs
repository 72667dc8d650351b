//! Subspace-inclusion residual and the finite-difference convergence sweep.
//!
//! For bases `B1` (`m x n`) and `B2` (`m x p`) the residual of each column of
//! `B1` against the least-squares fit by `B2` is recorded; the total
//! `r^2 = sum ||r_i||^2` vanishes exactly when `span(B1)` lies in `span(B2)`.
//! Both bases are orthonormalized first, so `r^2` depends only on the two
//! column spaces.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::activesubspace::{active_subspace, estimate, GradientConfig, Parallelism};
use crate::error::{Error, Result};
use crate::linalg::{Qr, RANK_TOL};
use crate::pipeflow::{builtin_model, BuiltinModel, Regime};
use crate::quadrature::tensor_grid;

#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    pub per_column_residuals: Vec<f64>,
    pub total: f64,
    /// `(n, p)`: columns of the candidate and enclosing bases.
    pub dims: (usize, usize),
    /// `max |R_kk| / min |R_kk|` of the original bases, candidate then enclosing.
    pub condition_original: (f64, f64),
    /// The same estimate after orthonormalization (1 up to rounding).
    pub condition_orthonormalized: (f64, f64),
}

/// Residual of `span(candidate)` against `span(enclosing)`.
pub fn inclusion_residual(
    candidate: &DMatrix<f64>,
    enclosing: &DMatrix<f64>,
) -> Result<InclusionReport> {
    let m = enclosing.nrows();
    if candidate.nrows() != m {
        return Err(Error::DimensionMismatch {
            what: "inclusion_residual",
            expected: m,
            found: candidate.nrows(),
        });
    }
    let (n, p) = (candidate.ncols(), enclosing.ncols());
    if n == 0 || p == 0 || p > m {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n and 1 <= p <= {m}, got n = {n}, p = {p}"
        )));
    }
    let enc = Qr::new(enclosing)?;
    if enc.rank(RANK_TOL) < p {
        return Err(Error::RankDeficient("enclosing basis".into()));
    }
    let cand = Qr::new(candidate)?;
    if cand.rank(RANK_TOL) < n {
        return Err(Error::RankDeficient("candidate basis".into()));
    }
    let q2 = &enc.q;
    let per_column_residuals: Vec<f64> = cand
        .q
        .column_iter()
        .map(|b| {
            let b = b.clone_owned();
            let a = q2.transpose() * &b;
            let r = q2 * a - b;
            r.norm_squared()
        })
        .collect();
    let total = per_column_residuals.iter().sum();
    Ok(InclusionReport {
        per_column_residuals,
        total,
        dims: (n, p),
        condition_original: (cand.condition_estimate(), enc.condition_estimate()),
        condition_orthonormalized: (
            Qr::new(&cand.q)?.condition_estimate(),
            Qr::new(q2)?.condition_estimate(),
        ),
    })
}

/// Residual vector of the least-squares fit of `b` by the columns of `basis`.
pub fn least_squares_residual(basis: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let qr = Qr::new(basis)?;
    if qr.rank(RANK_TOL) < basis.ncols() {
        return Err(Error::RankDeficient("least-squares basis".into()));
    }
    let a = qr.solve_least_squares(b);
    Ok(basis * a - b)
}

/// Values of `r^2` below this are treated as rounding noise by the slope fit.
pub const ROUNDING_FLOOR: f64 = 1e-24;

/// Ordinary least-squares slope of `log y` against `log x`, skipping points
/// with `y < floor`. `None` with fewer than two usable points.
pub fn loglog_slope(x: &[f64], y: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(_, &y)| y >= floor && y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub h: f64,
    pub r2: f64,
    /// Slope over this and all earlier points.
    pub slope_so_far: Option<f64>,
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub regime: Regime,
    pub quad_order: usize,
    /// Dimension of the active subspace compared.
    pub k: usize,
    pub points: Vec<SweepPoint>,
    pub slope: Option<f64>,
}

impl SweepResult {
    pub fn is_monotone_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].r2 < w[0].r2)
    }
}

/// For each step `h`, estimates the active subspace of the built-in model
/// (k = 1 laminar, k = 3 turbulent) and measures its inclusion in the
/// orthonormalized dimensional-analysis subspace.
pub fn convergence_sweep(
    regime: Regime,
    steps: &[f64],
    quad_order: usize,
    par: Parallelism,
) -> Result<SweepResult> {
    convergence_sweep_model(&builtin_model(regime)?, steps, quad_order, par)
}

/// [`convergence_sweep`] for an already configured model (e.g. another `Re_c`).
pub fn convergence_sweep_model(
    model: &BuiltinModel,
    steps: &[f64],
    quad_order: usize,
    par: Parallelism,
) -> Result<SweepResult> {
    let regime = model.regime;
    if steps.is_empty()
        || steps.iter().any(|&h| h.is_nan() || h <= 0.0)
        || steps.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidArgument(
            "steps must be positive and strictly descending".into(),
        ));
    }
    let grid = tensor_grid(quad_order, &model.log_bounds)?;
    let enclosing = model.decomposition.a_f64();
    let k = regime.active_dimension();

    let mut points: Vec<SweepPoint> = Vec::with_capacity(steps.len());
    for &h in steps {
        let est = estimate(
            &|x: &[f64]| model.eval_log(x),
            &grid,
            &GradientConfig::new(h)?,
            par,
        )?;
        let u = active_subspace(&est, k)?;
        let r2 = inclusion_residual(&u, &enclosing)?.total;
        let hs: Vec<f64> = points.iter().map(|p| p.h).chain([h]).collect();
        let rs: Vec<f64> = points.iter().map(|p| p.r2).chain([r2]).collect();
        points.push(SweepPoint {
            h,
            r2,
            slope_so_far: loglog_slope(&hs, &rs, ROUNDING_FLOOR),
            eigenvalues: est.eigenvalues,
        });
    }
    let slope = points.last().and_then(|p| p.slope_so_far);
    Ok(SweepResult {
        regime,
        quad_order,
        k,
        points,
        slope,
    })
}
