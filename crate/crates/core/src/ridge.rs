//! Ridge functions `f(x) = h(A^T x)` and the dimensionally homogeneous
//! semi-empirical form `q = exp(w^T log q) * g(log pi_1, ..., log pi_n)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exact::RationalMatrix;
use crate::linalg::{orthonormalize, Qr, RANK_TOL};
use crate::pigroups::{log_positive, PiDecomposition};

/// Scalar function of a slice, shareable across threads.
pub type Profile = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct RidgeModel {
    a: DMatrix<f64>,
    profile: Profile,
}

impl RidgeModel {
    /// `a` must have full column rank.
    pub fn new(a: DMatrix<f64>, profile: Profile) -> Result<Self> {
        if a.ncols() > a.nrows() || Qr::new(&a)?.rank(RANK_TOL) < a.ncols() {
            return Err(Error::RankDeficient("ridge matrix".into()));
        }
        Ok(Self { a, profile })
    }

    /// Converts an exact matrix (e.g. `[w | W]`) once, entry by entry.
    pub fn from_exact(a: &RationalMatrix, profile: Profile) -> Result<Self> {
        Self::new(a.to_f64(), profile)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        ridge_eval(self, x)
    }
}

impl fmt::Debug for RidgeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RidgeModel")
            .field("a", &self.a)
            .finish_non_exhaustive()
    }
}

pub fn ridge_eval(model: &RidgeModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.a.nrows() {
        return Err(Error::DimensionMismatch {
            what: "ridge_eval",
            expected: model.a.nrows(),
            found: x.len(),
        });
    }
    let y = model.a.transpose() * DVector::from_column_slice(x);
    Ok((model.profile)(y.as_slice()))
}

/// `exp(w^T log q) * g(log pi)`, homogeneous in the units by construction.
#[derive(Clone)]
pub struct SemiEmpiricalModel {
    pub w: Vec<f64>,
    /// `m x n`.
    pub null_basis: DMatrix<f64>,
    pub g: Profile,
    names: Option<Vec<String>>,
}

impl SemiEmpiricalModel {
    pub fn new(w: Vec<f64>, null_basis: DMatrix<f64>, g: Profile) -> Result<Self> {
        if null_basis.nrows() != w.len() && null_basis.ncols() > 0 {
            return Err(Error::DimensionMismatch {
                what: "semi-empirical model",
                expected: w.len(),
                found: null_basis.nrows(),
            });
        }
        Ok(Self {
            w,
            null_basis,
            g,
            names: None,
        })
    }

    pub fn from_decomposition(dec: &PiDecomposition, g: Profile) -> Result<Self> {
        let mut m = Self::new(dec.w_f64(), dec.null_basis.to_f64(), g)?;
        m.names = Some(dec.d.column_names.clone());
        Ok(m)
    }
}

impl fmt::Debug for SemiEmpiricalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemiEmpiricalModel")
            .field("w", &self.w)
            .field("null_basis", &self.null_basis)
            .finish_non_exhaustive()
    }
}

pub fn semi_empirical_eval(model: &SemiEmpiricalModel, q: &[f64]) -> Result<f64> {
    if q.len() != model.w.len() {
        return Err(Error::DimensionMismatch {
            what: "semi_empirical_eval",
            expected: model.w.len(),
            found: q.len(),
        });
    }
    let logq = DVector::from_vec(log_positive(q, model.names.as_deref())?);
    let scale = DVector::from_column_slice(&model.w).dot(&logq).exp();
    // log pi_i = W_i^T log q
    let log_pi = model.null_basis.transpose() * &logq;
    Ok(scale * (model.g)(log_pi.as_slice()))
}

/// Orthonormal basis of the null space of `A^T`: the directions along which
/// a ridge function with matrix `A` is constant.
pub fn constancy_directions(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = a.nrows();
    if a.ncols() > m {
        return Err(Error::RankDeficient("more columns than rows".into()));
    }
    let q = if a.ncols() == 0 {
        DMatrix::zeros(m, 0)
    } else {
        orthonormalize(a)?
    };
    let want = m - a.ncols();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(want);

    // modified Gram-Schmidt of coordinate vectors against Q and the accepted
    // directions, two passes; each step keeps the candidate with the largest
    // surviving norm
    let project_out = |mut v: DVector<f64>, basis: &[DVector<f64>]| {
        for _ in 0..2 {
            for c in q.column_iter() {
                let p = c.dot(&v);
                v.axpy(-p, &c, 1.0);
            }
            for b in basis {
                let p = b.dot(&v);
                v.axpy(-p, b, 1.0);
            }
        }
        v
    };
    while basis.len() < want {
        let best = (0..m)
            .map(|i| {
                project_out(
                    DVector::from_fn(m, |j, _| if i == j { 1.0 } else { 0.0 }),
                    &basis,
                )
            })
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("m > 0");
        let norm = best.norm();
        if norm < 1e-8 {
            break;
        }
        basis.push(best / norm);
    }
    if basis.len() != want {
        return Err(Error::RankDeficient(
            "could not complete the constancy basis".into(),
        ));
    }
    Ok(if want == 0 {
        DMatrix::zeros(m, 0)
    } else {
        DMatrix::from_columns(&basis)
    })
}
