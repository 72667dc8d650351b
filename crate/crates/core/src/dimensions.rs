//! Fundamental-unit systems and exact dimension vectors.
//!
//! A quantity's dimension is a product of powers of the `k` fundamental units
//! of a [`UnitSystem`]; its [`DimensionVector`] stores those powers as exact
//! rationals in the system's declared unit order.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest supported number of fundamental units (the SI base units).
pub const MAX_UNITS: usize = 7;

/// Shorthand for the exact rational `num / den`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or an integer literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || {
        Error::Schema(format!(
            "`{s}` is not a rational number (expected \"p/q\" or an integer)"
        ))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Renders a rational as `p/q`, or just `p` when it is an integer.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Ordered set of fundamental-unit labels. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UnitSystem {
    names: Arc<[String]>,
}

impl UnitSystem {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > MAX_UNITS {
            return Err(Error::InvalidUnitSystem(format!(
                "need between 1 and {MAX_UNITS} units, got {}",
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if n.trim().is_empty() {
                return Err(Error::InvalidUnitSystem("empty unit label".into()));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidUnitSystem(format!(
                    "duplicate unit label `{n}`"
                )));
            }
        }
        Ok(Self {
            names: names.into(),
        })
    }

    /// Number of fundamental units `k`.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.names.iter().position(|n| n == label)
    }
}

impl fmt::Debug for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

/// Exponents of a quantity's units over a [`UnitSystem`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DimensionVector {
    exponents: Vec<BigRational>,
    system: UnitSystem,
}

impl DimensionVector {
    /// Builds a vector directly from exponents in the system's unit order.
    pub fn from_exponents(system: &UnitSystem, exponents: Vec<BigRational>) -> Result<Self> {
        if exponents.len() != system.len() {
            return Err(Error::DimensionMismatch {
                what: "dimension vector",
                expected: system.len(),
                found: exponents.len(),
            });
        }
        Ok(Self {
            exponents,
            system: system.clone(),
        })
    }

    pub fn dimensionless(system: &UnitSystem) -> Self {
        Self {
            exponents: vec![BigRational::zero(); system.len()],
            system: system.clone(),
        }
    }

    pub fn exponents(&self) -> &[BigRational] {
        &self.exponents
    }

    pub fn system(&self) -> &UnitSystem {
        &self.system
    }

    /// Exponent attached to `label`, if the label belongs to the system.
    pub fn exponent(&self, label: &str) -> Option<&BigRational> {
        self.system.index_of(label).map(|i| &self.exponents[i])
    }
}

impl fmt::Debug for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.exponents.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Builds a dimension vector from `(unit, exponent)` pairs. Units not
/// mentioned get exponent zero; repeated units accumulate.
pub fn make_dimension<'a, I>(system: &UnitSystem, pairs: I) -> Result<DimensionVector>
where
    I: IntoIterator<Item = (&'a str, BigRational)>,
{
    let mut v = DimensionVector::dimensionless(system);
    for (label, e) in pairs {
        let i = system
            .index_of(label)
            .ok_or_else(|| Error::UnknownUnit(label.to_string()))?;
        v.exponents[i] += e;
    }
    Ok(v)
}

/// Returns `power_a * a + power_b * b`, i.e. the dimension of `a^pa * b^pb`.
pub fn combine(
    a: &DimensionVector,
    b: &DimensionVector,
    power_a: &BigRational,
    power_b: &BigRational,
) -> Result<DimensionVector> {
    if a.system != b.system {
        return Err(Error::MismatchedSystems);
    }
    let exponents = a
        .exponents
        .iter()
        .zip(&b.exponents)
        .map(|(x, y)| power_a * x + power_b * y)
        .collect();
    Ok(DimensionVector {
        exponents,
        system: a.system.clone(),
    })
}

/// Exact test: every exponent is zero.
pub fn is_dimensionless(v: &DimensionVector) -> bool {
    v.exponents.iter().all(Zero::is_zero)
}

/// A named input quantity with its dimension and sampling range in its own units.
#[derive(Clone, Debug)]
pub struct QuantityDecl {
    pub name: String,
    pub dimension: DimensionVector,
    pub range_lo: f64,
    pub range_hi: f64,
}

impl QuantityDecl {
    pub fn new(
        name: impl Into<String>,
        dimension: DimensionVector,
        range_lo: f64,
        range_hi: f64,
    ) -> Result<Self> {
        let name = name.into();
        if !(range_lo > 0.0 && range_lo < range_hi && range_hi.is_finite()) {
            return Err(Error::InvalidRange {
                name,
                lo: range_lo,
                hi: range_hi,
            });
        }
        Ok(Self {
            name,
            dimension,
            range_lo,
            range_hi,
        })
    }

    /// Bounds of `log q`, the coordinates in which models are explored.
    pub fn log_bounds(&self) -> (f64, f64) {
        (self.range_lo.ln(), self.range_hi.ln())
    }
}

pub(crate) fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    use num_integer::Integer;
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub(crate) fn first_nonzero_is_negative<'a>(it: impl IntoIterator<Item = &'a BigRational>) -> bool {
    it.into_iter()
        .find(|r| !r.is_zero())
        .is_some_and(|r| r.is_negative())
}
