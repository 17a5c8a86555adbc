//! Serializable table descriptions (TOML) and their conversion to and from
//! [`BilliardTable`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::geometry::{build_cylinder, validate_table, BilliardTable, ValidationOptions};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed table: {0}")]
    Parse(String),
    #[error("invalid field `{field}`: {source}")]
    Invalid {
        field: String,
        #[source]
        source: Error,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderSpec {
    /// Integer basis of the generator subspace, one row per vector. Empty
    /// for a point scatterer (full-dimensional base).
    #[serde(default)]
    pub generator: Vec<Vec<i64>>,
    pub translation: Vec<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationSpec {
    #[serde(default = "yes")]
    pub check_disjoint: bool,
    #[serde(default = "default_budget")]
    pub disjoint_budget: usize,
    /// Fail validation unless the scatterers are certified disjoint.
    #[serde(default)]
    pub require_disjoint: bool,
    /// Fail validation unless every pair of base spaces meets nontrivially.
    #[serde(default)]
    pub require_base_intersection: bool,
}

fn yes() -> bool {
    true
}

fn default_budget() -> usize {
    crate::geometry::DEFAULT_DISJOINT_BUDGET
}

impl Default for ValidationSpec {
    fn default() -> Self {
        Self {
            check_disjoint: true,
            disjoint_budget: default_budget(),
            require_disjoint: false,
            require_base_intersection: false,
        }
    }
}

impl ValidationSpec {
    pub fn options(&self) -> ValidationOptions {
        ValidationOptions {
            check_disjoint: self.check_disjoint,
            disjoint_budget: self.disjoint_budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub dim: usize,
    pub cylinders: Vec<CylinderSpec>,
    #[serde(default)]
    pub validation: ValidationSpec,
}

impl TableSpec {
    pub fn from_toml(text: &str) -> Result<Self, FormatError> {
        toml::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("table spec serializes")
    }

    /// Build and validate the table.
    pub fn build<T: Scalar>(&self) -> Result<BilliardTable<T>, FormatError> {
        let mut cylinders = Vec::with_capacity(self.cylinders.len());
        for (i, c) in self.cylinders.iter().enumerate() {
            let t: Vec<T> = c.translation.iter().map(|&x| T::lit(x)).collect();
            let cyl = build_cylinder(&c.generator, &t, T::lit(c.radius), self.dim).map_err(
                |source| FormatError::Invalid {
                    field: format!("cylinders[{i}]"),
                    source,
                },
            )?;
            cylinders.push(cyl);
        }
        let table = BilliardTable::new(self.dim, cylinders).map_err(|source| {
            FormatError::Invalid {
                field: "dim".into(),
                source,
            }
        })?;
        Ok(validate_table(table, &self.validation.options()))
    }

    /// Description of an existing table (translations as stored, i.e.
    /// reduced to the unit cube).
    pub fn from_table<T: Scalar>(table: &BilliardTable<T>, validation: ValidationSpec) -> Self {
        Self {
            dim: table.dim(),
            cylinders: table
                .cylinders()
                .iter()
                .map(|c| CylinderSpec {
                    generator: c.generator().integer_basis().to_vec(),
                    translation: c.translation().iter().map(|x| x.as_f64()).collect(),
                    radius: c.radius().as_f64(),
                })
                .collect(),
            validation,
        }
    }
}
