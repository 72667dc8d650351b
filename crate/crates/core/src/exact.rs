//! Dense matrices of exact rationals and fraction-free row reduction.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::dimensions::{format_rational, lcm_of_denominators};

#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let n = rows.len();
        Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| BigRational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
        )
    }

    /// Builds an `nrows x columns.len()` matrix. Panics on length mismatch.
    pub fn from_columns(nrows: usize, columns: &[Vec<BigRational>]) -> Self {
        let mut m = Self::zeros(nrows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), nrows, "column length");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigRational>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.cols, "mul_vec length");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "mul shapes");
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigRational::zero();
                for k in 0..self.cols {
                    acc += &self[(i, k)] * &other[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Nearest-double image of every entry.
    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].to_f64().unwrap_or(f64::NAN)
        })
    }

    /// Exact rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        Echelon::reduce(self, None, &PivotRule::Canonical)
            .pivots
            .len()
    }

    /// Rows rendered with `p/q` entries.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.to_strings() {
            writeln!(f, "[{}]", r.join(", "))?;
        }
        Ok(())
    }
}

/// Order in which columns are offered as pivots.
///
/// `Canonical` takes the leftmost column holding a nonzero entry in the
/// unreduced rows, then the topmost such entry. `Reversed` scans columns
/// right to left with the same row rule; it yields a different, equally
/// valid null basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    #[default]
    Canonical,
    Reversed,
}

impl PivotRule {
    fn order(&self, n: usize) -> Vec<usize> {
        match self {
            PivotRule::Canonical => (0..n).collect(),
            PivotRule::Reversed => (0..n).rev().collect(),
        }
    }
}

/// Integer row-echelon form produced by Bareiss elimination.
///
/// Each row is first scaled by the lcm of its denominators, after which every
/// intermediate entry is an integer and every division is exact.
pub(crate) struct Echelon {
    /// `rows x (cols + 1)`, last column is the right-hand side (zero if absent).
    m: Vec<Vec<BigInt>>,
    cols: usize,
    /// `(row, column)` of each pivot, in elimination order.
    pub pivots: Vec<(usize, usize)>,
}

impl Echelon {
    pub fn reduce(a: &RationalMatrix, rhs: Option<&[BigRational]>, rule: &PivotRule) -> Self {
        let (rows, cols) = (a.nrows(), a.ncols());
        let mut m: Vec<Vec<BigInt>> = (0..rows)
            .map(|i| {
                let mut row: Vec<BigRational> = a.row(i).to_vec();
                row.push(rhs.map_or_else(BigRational::zero, |b| b[i].clone()));
                let l = lcm_of_denominators(&row);
                row.iter().map(|x| (x * &l).to_integer()).collect()
            })
            .collect();

        let mut prev = BigInt::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in rule.order(cols) {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            for i in r + 1..rows {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let num = &m[r][c] * &m[i][j] - &f * &m[r][j];
                    let (q, rem) = num.div_rem(&prev);
                    debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                    m[i][j] = q;
                }
            }
            prev = m[r][c].clone();
            pivots.push((r, c));
            r += 1;
        }
        Self { m, cols, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// True when some row without a pivot has a nonzero right-hand side.
    pub fn is_inconsistent(&self) -> bool {
        self.m[self.rank()..]
            .iter()
            .any(|row| !row[self.cols].is_zero())
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|c| !self.pivots.iter().any(|&(_, p)| p == *c))
            .collect()
    }

    /// Back-substitution with the free variables fixed to `free_values`
    /// (indexed by column; pivot entries are ignored). `with_rhs` selects
    /// between `A x = b` and `A x = 0`.
    pub fn back_substitute(&self, free_values: &[BigRational], with_rhs: bool) -> Vec<BigRational> {
        let mut x = free_values.to_vec();
        let pivot_cols: Vec<usize> = self.pivots.iter().map(|&(_, c)| c).collect();
        for &(r, c) in self.pivots.iter().rev() {
            let row = &self.m[r];
            let mut acc = if with_rhs {
                BigRational::from_integer(row[self.cols].clone())
            } else {
                BigRational::zero()
            };
            for j in 0..self.cols {
                if j == c || row[j].is_zero() {
                    continue;
                }
                debug_assert!(!pivot_cols.contains(&j) || self.pivot_row(j) > r);
                acc -= BigRational::from_integer(row[j].clone()) * &x[j];
            }
            x[c] = acc / BigRational::from_integer(row[c].clone());
        }
        x
    }

    fn pivot_row(&self, col: usize) -> usize {
        self.pivots
            .iter()
            .find(|&&(_, c)| c == col)
            .map_or(usize::MAX, |&(r, _)| r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimensions::rat;

    #[test]
    fn rank_small_cases() {
        assert_eq!(RationalMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(RationalMatrix::identity(3).rank(), 3);
        let m = RationalMatrix::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rational_entries_reduce_exactly() {
        let m = RationalMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3), rat(1, 4)],
            vec![rat(1, 3), rat(1, 4), rat(1, 5)],
            vec![rat(1, 4), rat(1, 5), rat(1, 6)],
        ]);
        assert_eq!(m.rank(), 3);
        let b = vec![rat(1, 1), rat(0, 1), rat(0, 1)];
        let e = Echelon::reduce(&m, Some(&b), &PivotRule::Canonical);
        assert!(!e.is_inconsistent());
        let x = e.back_substitute(&vec![BigRational::zero(); 3], true);
        assert_eq!(m.mul_vec(&x), b);
    }

    #[test]
    fn inconsistent_system_detected() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 1], &[2, 2]]);
        let b = vec![rat(1, 1), rat(3, 1)];
        assert!(Echelon::reduce(&m, Some(&b), &PivotRule::Canonical).is_inconsistent());
    }

    #[test]
    fn reversed_rule_picks_other_pivots() {
        let m = RationalMatrix::from_i64_rows(&[&[1, 1, 0], &[0, 1, 1]]);
        let a = Echelon::reduce(&m, None, &PivotRule::Canonical);
        let b = Echelon::reduce(&m, None, &PivotRule::Reversed);
        assert_eq!(a.free_columns(), vec![2]);
        assert_eq!(b.free_columns(), vec![0]);
    }
}
