//! Buckingham Pi decomposition in exact arithmetic.
//!
//! For inputs `q_1..q_m` with dimension matrix `D` (`k x m`) and a quantity
//! of interest with dimension vector `v`, this module finds
//!
//! * a particular exponent vector `w` with `D w = v`, so `q / prod q_j^w_j`
//!   is dimensionless,
//! * a basis `W` of the null space of `D`, whose columns are the exponents of
//!   the pi groups,
//! * the matrix `A = [w | W]` spanning the dimensional-analysis subspace.
//!
//! Every identity above holds with exact rational equality.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::dimensions::{
    first_nonzero_is_negative, is_dimensionless, lcm_of_denominators, DimensionVector,
    QuantityDecl, UnitSystem,
};
use crate::error::{Error, Result};
use crate::exact::{Echelon, PivotRule, RationalMatrix};

/// The `k x m` matrix whose column `j` is the dimension vector of quantity `j`.
#[derive(Clone, Debug)]
pub struct DimensionMatrix {
    pub entries: RationalMatrix,
    pub column_names: Vec<String>,
    pub system: UnitSystem,
}

impl DimensionMatrix {
    pub fn k(&self) -> usize {
        self.entries.nrows()
    }

    pub fn m(&self) -> usize {
        self.entries.ncols()
    }
}

pub fn build_dimension_matrix(quantities: &[QuantityDecl]) -> Result<DimensionMatrix> {
    let names: Vec<String> = quantities.iter().map(|q| q.name.clone()).collect();
    let dims: Vec<DimensionVector> = quantities.iter().map(|q| q.dimension.clone()).collect();
    dimension_matrix(&names, &dims)
}

/// Same as [`build_dimension_matrix`] for quantities without sampling ranges.
pub fn dimension_matrix(names: &[String], dims: &[DimensionVector]) -> Result<DimensionMatrix> {
    let first = dims.first().ok_or(Error::EmptyQuantities)?;
    let system = first.system().clone();
    if dims.iter().any(|d| d.system() != &system) {
        return Err(Error::MismatchedSystems);
    }
    let columns: Vec<Vec<BigRational>> = dims.iter().map(|d| d.exponents().to_vec()).collect();
    Ok(DimensionMatrix {
        entries: RationalMatrix::from_columns(system.len(), &columns),
        column_names: names.to_vec(),
        system,
    })
}

pub fn rank_exact(d: &DimensionMatrix) -> usize {
    d.entries.rank()
}

/// Solves `D w = target` exactly, free variables set to zero.
pub fn solve_particular(d: &DimensionMatrix, target: &DimensionVector) -> Result<Vec<BigRational>> {
    solve_particular_named(d, target, "quantity of interest")
}

fn solve_particular_named(
    d: &DimensionMatrix,
    target: &DimensionVector,
    qoi: &str,
) -> Result<Vec<BigRational>> {
    if target.system() != &d.system {
        return Err(Error::MismatchedSystems);
    }
    let echelon = Echelon::reduce(&d.entries, Some(target.exponents()), &PivotRule::Canonical);
    if echelon.is_inconsistent() {
        return Err(Error::Inconsistent {
            qoi: qoi.to_string(),
        });
    }
    let w = echelon.back_substitute(&vec![BigRational::zero(); d.m()], true);
    // verified before return
    if d.entries.mul_vec(&w) != target.exponents() {
        return Err(Error::Inconsistent {
            qoi: qoi.to_string(),
        });
    }
    Ok(w)
}

/// Rational null-space basis of `D` (`m x n`, `n = m - rank`), with each
/// column scaled to integers and signed so its first nonzero entry is positive.
pub fn null_space_basis(d: &DimensionMatrix) -> RationalMatrix {
    null_space_basis_with(d, &PivotRule::Canonical)
}

pub fn null_space_basis_with(d: &DimensionMatrix, rule: &PivotRule) -> RationalMatrix {
    let m = d.m();
    let echelon = Echelon::reduce(&d.entries, None, rule);
    let columns: Vec<Vec<BigRational>> = echelon
        .free_columns()
        .into_iter()
        .map(|f| {
            let mut free = vec![BigRational::zero(); m];
            free[f] = BigRational::from_integer(1.into());
            normalize_column(echelon.back_substitute(&free, false))
        })
        .collect();
    RationalMatrix::from_columns(m, &columns)
}

fn normalize_column(col: Vec<BigRational>) -> Vec<BigRational> {
    let mut scale = BigRational::from_integer(lcm_of_denominators(&col));
    if first_nonzero_is_negative(&col) {
        scale = -scale;
    }
    col.into_iter().map(|x| x * &scale).collect()
}

/// Assembles `A = [w | W]` and checks it has full column rank.
pub fn assemble_a(w: &[BigRational], null_basis: &RationalMatrix) -> Result<RationalMatrix> {
    if null_basis.ncols() > 0 && null_basis.nrows() != w.len() {
        return Err(Error::DimensionMismatch {
            what: "assemble_a",
            expected: w.len(),
            found: null_basis.nrows(),
        });
    }
    let mut columns = vec![w.to_vec()];
    columns.extend(null_basis.columns());
    let a = RationalMatrix::from_columns(w.len(), &columns);
    if a.rank() != a.ncols() {
        return Err(Error::RankDeficient(
            "w lies in the span of the null basis; the quantity of interest is already dimensionless".into(),
        ));
    }
    Ok(a)
}

/// Evaluates `pi_i = exp(W_i^T log q)` for each column of `null_basis`.
pub fn pi_values(null_basis: &RationalMatrix, q: &[f64]) -> Result<Vec<f64>> {
    pi_values_named(null_basis, q, None)
}

fn pi_values_named(
    null_basis: &RationalMatrix,
    q: &[f64],
    names: Option<&[String]>,
) -> Result<Vec<f64>> {
    if q.len() != null_basis.nrows() {
        return Err(Error::DimensionMismatch {
            what: "pi_values",
            expected: null_basis.nrows(),
            found: q.len(),
        });
    }
    let logq = log_positive(q, names)?;
    let wf = null_basis.to_f64();
    Ok((0..wf.ncols())
        .map(|j| {
            wf.column(j)
                .dot(&nalgebra::DVector::from_column_slice(&logq))
                .exp()
        })
        .collect())
}

pub(crate) fn log_positive(q: &[f64], names: Option<&[String]>) -> Result<Vec<f64>> {
    q.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v > 0.0 && v.is_finite() {
                Ok(v.ln())
            } else {
                let name = names
                    .and_then(|n| n.get(i).cloned())
                    .unwrap_or_else(|| format!("q[{i}]"));
                Err(Error::NonPositive { name, value: v })
            }
        })
        .collect()
}

/// Complete output of the nondimensionalization of one model.
#[derive(Clone, Debug)]
pub struct PiDecomposition {
    pub d: DimensionMatrix,
    pub qoi_name: String,
    pub qoi_dimension: DimensionVector,
    /// Particular solution of `D w = v(q)`.
    pub w: Vec<BigRational>,
    /// Null basis, `m x n`.
    pub null_basis: RationalMatrix,
    /// `[w | W]`, or `W` alone when the quantity of interest is dimensionless.
    pub a: RationalMatrix,
    pub rank: usize,
    /// Set when `v(q) = 0`; `A` then omits the zero `w` column.
    pub qoi_dimensionless: bool,
}

impl PiDecomposition {
    pub fn new(quantities: &[QuantityDecl], qoi_name: &str, qoi: &DimensionVector) -> Result<Self> {
        Self::from_dimension_matrix(build_dimension_matrix(quantities)?, qoi_name, qoi)
    }

    pub fn from_dimension_matrix(
        d: DimensionMatrix,
        qoi_name: &str,
        qoi: &DimensionVector,
    ) -> Result<Self> {
        let rank = rank_exact(&d);
        let w = solve_particular_named(&d, qoi, qoi_name)?;
        let null_basis = null_space_basis(&d);
        let qoi_dimensionless = is_dimensionless(qoi);
        let a = if qoi_dimensionless {
            null_basis.clone()
        } else {
            assemble_a(&w, &null_basis)?
        };
        Ok(Self {
            d,
            qoi_name: qoi_name.to_string(),
            qoi_dimension: qoi.clone(),
            w,
            null_basis,
            a,
            rank,
            qoi_dimensionless,
        })
    }

    /// Number of pi groups.
    pub fn n(&self) -> usize {
        self.null_basis.ncols()
    }

    /// Fewer independent unit rows than units, i.e. `rank(D) < k`.
    pub fn is_incomplete(&self) -> bool {
        self.rank < self.d.k()
    }

    pub fn pi_values(&self, q: &[f64]) -> Result<Vec<f64>> {
        pi_values_named(&self.null_basis, q, Some(&self.d.column_names))
    }

    pub fn w_f64(&self) -> Vec<f64> {
        self.w
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn a_f64(&self) -> DMatrix<f64> {
        self.a.to_f64()
    }
}
