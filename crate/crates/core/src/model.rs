//! JSON model files.
//!
//! ```json
//! {
//!   "name": "pipeflow_laminar",
//!   "builtin": "pipeflow_laminar",
//!   "units": ["kg", "m", "s"],
//!   "quantities": [
//!     { "name": "rho", "units": { "kg": 1, "m": -3 }, "range": [0.1, 0.14] }
//!   ],
//!   "qoi": { "name": "V", "units": { "m": 1, "s": -1 } }
//! }
//! ```
//!
//! Exponents are integers or `"p/q"` strings. `range` is optional unless the
//! model is used for subspace estimation. `builtin` names the evaluator used
//! by the `active` and `sweep` commands.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dimensions::{
    make_dimension, parse_rational, DimensionVector, QuantityDecl, UnitSystem,
};
use crate::error::{Error, Result};
use crate::pigroups::{dimension_matrix, PiDecomposition};
use crate::pipeflow::Regime;

pub const PIPEFLOW: &str = include_str!("../models/pipeflow.json");
pub const PIPEFLOW_LAMINAR: &str = include_str!("../models/pipeflow_laminar.json");
pub const PIPEFLOW_TURBULENT: &str = include_str!("../models/pipeflow_turbulent.json");

#[derive(Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum Exponent {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct QuantityEntry {
    name: String,
    #[serde(default)]
    units: BTreeMap<String, Exponent>,
    #[serde(default)]
    range: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct QoiEntry {
    name: String,
    #[serde(default)]
    units: BTreeMap<String, Exponent>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    builtin: Option<String>,
    units: Vec<String>,
    quantities: Vec<QuantityEntry>,
    qoi: QoiEntry,
}

#[derive(Clone, Debug)]
pub struct InputQuantity {
    pub name: String,
    pub dimension: DimensionVector,
    pub range: Option<(f64, f64)>,
}

/// A validated model description.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub name: String,
    pub unit_system: UnitSystem,
    pub quantities: Vec<InputQuantity>,
    pub qoi_name: String,
    pub qoi: DimensionVector,
    pub builtin: Option<Regime>,
}

impl ModelSpec {
    /// Inputs with their ranges; fails naming the first quantity without one.
    pub fn quantity_decls(&self) -> Result<Vec<QuantityDecl>> {
        self.quantities
            .iter()
            .map(|q| {
                let (lo, hi) = q.range.ok_or_else(|| {
                    Error::Schema(format!("quantities.{}.range is required here", q.name))
                })?;
                QuantityDecl::new(q.name.clone(), q.dimension.clone(), lo, hi)
            })
            .collect()
    }

    pub fn decompose(&self) -> Result<PiDecomposition> {
        let names: Vec<String> = self.quantities.iter().map(|q| q.name.clone()).collect();
        let dims: Vec<DimensionVector> = self
            .quantities
            .iter()
            .map(|q| q.dimension.clone())
            .collect();
        PiDecomposition::from_dimension_matrix(
            dimension_matrix(&names, &dims)?,
            &self.qoi_name,
            &self.qoi,
        )
    }

    /// `log` of every range, in declaration order.
    pub fn log_bounds(&self) -> Result<Vec<(f64, f64)>> {
        Ok(self
            .quantity_decls()?
            .iter()
            .map(QuantityDecl::log_bounds)
            .collect())
    }
}

fn parse_units(
    system: &UnitSystem,
    units: &BTreeMap<String, Exponent>,
    field: &str,
) -> Result<DimensionVector> {
    let mut pairs = Vec::with_capacity(units.len());
    for (label, e) in units {
        let r = match e {
            Exponent::Int(i) => crate::dimensions::rat(*i, 1),
            Exponent::Text(s) => parse_rational(s).map_err(|_| {
                Error::Schema(format!(
                    "{field}.units.{label}: `{s}` is not an integer or \"p/q\" rational"
                ))
            })?,
        };
        pairs.push((label.as_str(), r));
    }
    make_dimension(system, pairs)
}

pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let unit_system = UnitSystem::new(file.units.clone())?;
    if file.quantities.is_empty() {
        return Err(Error::EmptyQuantities);
    }
    let mut quantities = Vec::with_capacity(file.quantities.len());
    for (i, q) in file.quantities.iter().enumerate() {
        if q.name.trim().is_empty() {
            return Err(Error::Schema(format!("quantities[{i}].name is empty")));
        }
        if file.quantities[..i].iter().any(|p| p.name == q.name) {
            return Err(Error::Schema(format!(
                "quantities[{i}]: duplicate name `{}`",
                q.name
            )));
        }
        let dimension = parse_units(&unit_system, &q.units, &format!("quantities.{}", q.name))?;
        let range = match q.range {
            Some([lo, hi]) => {
                if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                    return Err(Error::InvalidRange {
                        name: q.name.clone(),
                        lo,
                        hi,
                    });
                }
                Some((lo, hi))
            }
            None => None,
        };
        quantities.push(InputQuantity {
            name: q.name.clone(),
            dimension,
            range,
        });
    }
    if quantities.iter().any(|q| q.name == file.qoi.name) {
        return Err(Error::Schema(format!(
            "qoi `{}` is also listed as an input quantity",
            file.qoi.name
        )));
    }
    let qoi = parse_units(&unit_system, &file.qoi.units, "qoi")?;
    let builtin = match file.builtin.as_deref() {
        None => None,
        Some(id) => Some(
            Regime::from_model_id(id)
                .ok_or_else(|| Error::Schema(format!("builtin: unknown model id `{id}`")))?,
        ),
    };
    Ok(ModelSpec {
        name: file.name.unwrap_or_else(|| "model".into()),
        unit_system,
        quantities,
        qoi_name: file.qoi.name,
        qoi,
        builtin,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text)
}

/// Built-in id (`pipeflow`, `pipeflow_laminar`, `pipeflow_turbulent`) or a path.
pub fn resolve_model(id_or_path: &str) -> Result<ModelSpec> {
    match id_or_path {
        "pipeflow" => parse_model(PIPEFLOW),
        "pipeflow_laminar" => parse_model(PIPEFLOW_LAMINAR),
        "pipeflow_turbulent" => parse_model(PIPEFLOW_TURBULENT),
        path => load_model(path),
    }
}
