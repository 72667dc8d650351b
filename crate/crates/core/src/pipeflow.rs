//! Viscous flow through a rough circular pipe.
//!
//! Bulk velocity is computed from the Poiseuille law below the critical
//! Reynolds number and from the explicit form of the Colebrook relation
//! above it. The regime is chosen from the Reynolds number of the turbulent
//! velocity; the switch is a branch, so the velocity may jump there.
//!
//! Quantities are always ordered `(rho, mu, D, eps, dPdL)` over the units
//! `(kg, m, s)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dimensions::{rat, DimensionVector, QuantityDecl, UnitSystem};
use crate::error::{Error, Result};
use crate::pigroups::PiDecomposition;

/// Default critical Reynolds number for the laminar/turbulent switch.
pub const RE_CRIT: f64 = 3.0e3;

pub const QUANTITY_NAMES: [&str; 5] = ["rho", "mu", "D", "eps", "dPdL"];
pub const UNIT_NAMES: [&str; 3] = ["kg", "m", "s"];

/// Unit exponents of each input over `(kg, m, s)`.
const QUANTITY_UNITS: [[i64; 3]; 5] = [[1, -3, 0], [1, -1, -1], [0, 1, 0], [0, 1, 0], [1, -2, -2]];
const VELOCITY_UNITS: [i64; 3] = [0, 1, -1];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipeState {
    /// Density, kg/m^3.
    pub rho: f64,
    /// Dynamic viscosity, kg/(m s).
    pub mu: f64,
    /// Diameter, m.
    pub diam: f64,
    /// Wall roughness, m.
    pub eps: f64,
    /// Pressure gradient, kg/(m s)^2.
    pub dpdl: f64,
}

impl PipeState {
    /// Validated constructor: all positive and `eps < diam`.
    pub fn new(rho: f64, mu: f64, diam: f64, eps: f64, dpdl: f64) -> Result<Self> {
        let s = Self {
            rho,
            mu,
            diam,
            eps,
            dpdl,
        };
        for (name, v) in QUANTITY_NAMES.iter().zip(s.as_array()) {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositive {
                    name: name.to_string(),
                    value: v,
                });
            }
        }
        if eps >= diam {
            return Err(Error::InvalidArgument(format!(
                "roughness {eps} must be below diameter {diam}"
            )));
        }
        Ok(s)
    }

    /// Unchecked, from `(rho, mu, D, eps, dPdL)`.
    pub fn from_array(q: &[f64]) -> Self {
        Self {
            rho: q[0],
            mu: q[1],
            diam: q[2],
            eps: q[3],
            dpdl: q[4],
        }
    }

    /// Unchecked, from `log q`.
    pub fn from_log(x: &[f64]) -> Self {
        Self {
            rho: x[0].exp(),
            mu: x[1].exp(),
            diam: x[2].exp(),
            eps: x[3].exp(),
            dpdl: x[4].exp(),
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.rho, self.mu, self.diam, self.eps, self.dpdl]
    }
}

/// Poiseuille bulk velocity `(dP/L) D^2 / (32 mu)`.
pub fn v_laminar(s: &PipeState) -> f64 {
    s.dpdl * s.diam * s.diam / (32.0 * s.mu)
}

/// Argument of the base-10 logarithm in the explicit turbulent velocity.
pub fn colebrook_log_argument(s: &PipeState) -> f64 {
    s.eps / (3.7 * s.diam)
        + 2.51 * (s.mu / s.diam.powf(1.5)) * (1.0 / (2.0 * s.rho * s.dpdl)).sqrt()
}

/// Closed-form turbulent velocity, without the validity check.
pub fn v_turbulent_raw(s: &PipeState) -> f64 {
    -2.0 * (s.dpdl * 2.0 * s.diam / s.rho).sqrt() * colebrook_log_argument(s).log10()
}

/// Turbulent bulk velocity from the explicit Colebrook relation. A log
/// argument of 1 or more makes the velocity non-positive and is rejected.
pub fn v_turbulent(s: &PipeState) -> Result<f64> {
    let arg = colebrook_log_argument(s);
    if arg >= 1.0 {
        return Err(Error::OutOfValidity(arg));
    }
    Ok(v_turbulent_raw(s))
}

pub fn reynolds(s: &PipeState, v: f64) -> f64 {
    s.rho * v * s.diam / s.mu
}

/// Darcy friction factor `(dP/L) D / (rho V^2 / 2)`.
pub fn friction_factor(s: &PipeState, v: f64) -> Result<f64> {
    if v == 0.0 {
        return Err(Error::InvalidArgument(
            "friction factor undefined at zero velocity".into(),
        ));
    }
    Ok(s.dpdl * s.diam / (0.5 * s.rho * v * v))
}

/// `1/sqrt(f) + 2 log10(eps/(3.7 D) + 2.51/(Re sqrt f))`; zero on the Colebrook curve.
pub fn colebrook_residual(s: &PipeState, v: f64) -> Result<f64> {
    let f = friction_factor(s, v)?;
    let re = reynolds(s, v);
    let sf = f.sqrt();
    Ok(1.0 / sf + 2.0 * (s.eps / (3.7 * s.diam) + 2.51 / (re * sf)).log10())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Laminar,
    Turbulent,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Laminar => "laminar",
            Regime::Turbulent => "turbulent",
        }
    }

    /// Expected active-subspace dimension of the built-in model.
    pub fn active_dimension(self) -> usize {
        match self {
            Regime::Laminar => 1,
            Regime::Turbulent => 3,
        }
    }

    /// Parameter box `(lo, hi)` per quantity, in physical units.
    pub fn table(self) -> RegimeTable {
        let mut bounds = [
            (1.0e-1, 1.4e-1),
            (1.0e-6, 1.0e-5),
            (1.0e-1, 1.0e0),
            (1.0e-3, 1.0e-1),
            (1.0e-9, 1.0e-7),
        ];
        if self == Regime::Turbulent {
            bounds[4] = (1.0e-1, 1.0e1);
        }
        RegimeTable { name: self, bounds }
    }

    pub fn model_id(self) -> &'static str {
        match self {
            Regime::Laminar => "pipeflow_laminar",
            Regime::Turbulent => "pipeflow_turbulent",
        }
    }

    pub fn from_model_id(id: &str) -> Option<Self> {
        [Regime::Laminar, Regime::Turbulent]
            .into_iter()
            .find(|r| r.model_id() == id)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laminar" => Ok(Regime::Laminar),
            "turbulent" => Ok(Regime::Turbulent),
            _ => Err(Error::Usage(format!(
                "unknown regime `{s}` (expected laminar or turbulent)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeTable {
    pub name: Regime,
    pub bounds: [(f64, f64); 5],
}

/// Velocity with the branch that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowSolution {
    pub velocity: f64,
    pub regime: Regime,
}

/// Picks the turbulent velocity when its Reynolds number strictly exceeds
/// `re_crit`, the laminar one otherwise.
pub fn bulk_velocity_with(s: &PipeState, re_crit: f64) -> FlowSolution {
    let vt = v_turbulent_raw(s);
    if reynolds(s, vt) > re_crit {
        FlowSolution {
            velocity: vt,
            regime: Regime::Turbulent,
        }
    } else {
        FlowSolution {
            velocity: v_laminar(s),
            regime: Regime::Laminar,
        }
    }
}

pub fn bulk_velocity(s: &PipeState) -> f64 {
    bulk_velocity_with(s, RE_CRIT).velocity
}

/// Declared inputs of the pipe system over `(kg, m, s)` with the given ranges.
pub fn pipe_quantities(bounds: &[(f64, f64); 5]) -> Result<Vec<QuantityDecl>> {
    let system = pipe_units();
    QUANTITY_NAMES
        .iter()
        .zip(QUANTITY_UNITS)
        .zip(bounds)
        .map(|((name, units), &(lo, hi))| {
            let dim = DimensionVector::from_exponents(
                &system,
                units.iter().map(|&e| rat(e, 1)).collect(),
            )?;
            QuantityDecl::new(*name, dim, lo, hi)
        })
        .collect()
}

pub fn pipe_units() -> UnitSystem {
    UnitSystem::new(UNIT_NAMES).expect("static unit system")
}

pub fn velocity_dimension() -> DimensionVector {
    DimensionVector::from_exponents(
        &pipe_units(),
        VELOCITY_UNITS.iter().map(|&e| rat(e, 1)).collect(),
    )
    .expect("static dimension")
}

/// A ready-to-run pipe-flow experiment for one regime.
#[derive(Clone, Debug)]
pub struct BuiltinModel {
    pub regime: Regime,
    pub table: RegimeTable,
    pub quantities: Vec<QuantityDecl>,
    pub log_bounds: Vec<(f64, f64)>,
    pub decomposition: PiDecomposition,
    pub re_crit: f64,
}

impl BuiltinModel {
    /// Bulk velocity at `q = exp(x)`.
    pub fn eval_log(&self, x: &[f64]) -> f64 {
        bulk_velocity_with(&PipeState::from_log(x), self.re_crit).velocity
    }

    pub fn solve_log(&self, x: &[f64]) -> FlowSolution {
        bulk_velocity_with(&PipeState::from_log(x), self.re_crit)
    }

    pub fn with_re_crit(mut self, re_crit: f64) -> Self {
        self.re_crit = re_crit;
        self
    }
}

pub fn builtin_model(regime: Regime) -> Result<BuiltinModel> {
    let table = regime.table();
    let quantities = pipe_quantities(&table.bounds)?;
    let log_bounds = quantities.iter().map(QuantityDecl::log_bounds).collect();
    let decomposition = PiDecomposition::new(&quantities, "V", &velocity_dimension())?;
    Ok(BuiltinModel {
        regime,
        table,
        quantities,
        log_bounds,
        decomposition,
        re_crit: RE_CRIT,
    })
}
