//! Gauss-Legendre rules and tensor-product grids over log-space boxes.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Clone, Debug)]
pub struct QuadratureRule1D {
    /// Ascending nodes on `[-1, 1]`.
    pub nodes: Vec<f64>,
    /// Positive weights summing to 2.
    pub weights: Vec<f64>,
    pub order: usize,
}

/// Legendre polynomial `P_n(x)` and its derivative via the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre rule with `order` nodes, exact for polynomials of degree `2*order - 1`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule1D> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "quadrature order must be at least 1".into(),
        ));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // roots come in +/- pairs; solve for the positive half and mirror
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule1D {
        nodes,
        weights,
        order,
    })
}

/// Tensor product of a 1-D rule mapped onto an axis-aligned box, with weights
/// normalized to a uniform probability density. Points are produced on
/// demand in lexicographic order, the first dimension varying slowest.
#[derive(Clone, Debug)]
pub struct TensorGrid {
    rule: QuadratureRule1D,
    bounds: Vec<(f64, f64)>,
    len: usize,
}

pub fn tensor_grid(rule_order: usize, bounds: &[(f64, f64)]) -> Result<TensorGrid> {
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "degenerate bounds ({lo}, {hi}) in dimension {i}"
            )));
        }
    }
    if bounds.is_empty() {
        return Err(Error::InvalidArgument(
            "grid needs at least one dimension".into(),
        ));
    }
    let rule = gauss_legendre(rule_order)?;
    let len = u32::try_from(bounds.len())
        .ok()
        .and_then(|d| rule_order.checked_pow(d))
        .ok_or_else(|| Error::InvalidArgument("grid too large".into()))?;
    Ok(TensorGrid {
        rule,
        bounds: bounds.to_vec(),
        len,
    })
}

impl TensorGrid {
    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn order(&self) -> usize {
        self.rule.order
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Writes point `index` into `out` and returns its weight.
    pub fn point_into(&self, mut index: usize, out: &mut [f64]) -> f64 {
        let n = self.rule.order;
        let mut weight = 1.0;
        for d in (0..self.dim()).rev() {
            let i = index % n;
            index /= n;
            let (lo, hi) = self.bounds[d];
            out[d] = lo + 0.5 * (self.rule.nodes[i] + 1.0) * (hi - lo);
            weight *= 0.5 * self.rule.weights[i];
        }
        weight
    }

    pub fn point(&self, index: usize) -> (Vec<f64>, f64) {
        let mut x = vec![0.0; self.dim()];
        let w = self.point_into(index, &mut x);
        (x, w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        (0..self.len).map(|i| self.point(i))
    }

    /// Weighted average of `f` over the box.
    pub fn mean<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        let mut x = vec![0.0; self.dim()];
        let mut acc = 0.0;
        for i in 0..self.len {
            let w = self.point_into(i, &mut x);
            acc += w * f(&x);
        }
        acc
    }
}
