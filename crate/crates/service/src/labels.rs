//! Display names and the affine map between the unit cube and native units.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterLabel {
    pub name: String,
    #[serde(default)]
    pub unit: String,
    pub min: f64,
    pub max: f64,
}

impl ParameterLabel {
    pub fn unit_interval(i: usize) -> Self {
        ParameterLabel { name: format!("x{i}"), unit: String::new(), min: 0.0, max: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(ServiceError::invalid(format!(
                "parameter {} needs finite min < max, got [{}, {}]",
                self.name, self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn to_native(&self, u: f64) -> f64 {
        self.min + u * (self.max - self.min)
    }

    pub fn to_unit(&self, v: f64) -> f64 {
        (v - self.min) / (self.max - self.min)
    }
}

pub fn to_native(labels: &[ParameterLabel], x: &[f64]) -> Vec<f64> {
    labels.iter().zip(x).map(|(l, &u)| l.to_native(u)).collect()
}

/// Maps native values into the unit cube, rejecting values outside the ranges.
pub fn to_unit(labels: &[ParameterLabel], v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != labels.len() {
        return Err(ServiceError::invalid(format!(
            "expected {} parameter values, got {}",
            labels.len(),
            v.len()
        )));
    }
    labels
        .iter()
        .zip(v)
        .map(|(l, &x)| {
            let u = l.to_unit(x);
            if !(0.0..=1.0).contains(&u) {
                return Err(ServiceError::invalid(format!(
                    "{} = {x} is outside [{}, {}]",
                    l.name, l.min, l.max
                )));
            }
            Ok(u)
        })
        .collect()
}
