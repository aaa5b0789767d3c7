//! Machine-readable experiment reports.

use std::collections::BTreeMap;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::spec::ExperimentSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Report {
    pub version: String,
    pub seed: u64,
    pub spec: ExperimentSpec,
    /// Every tolerance in force, overrides applied.
    pub tolerances: BTreeMap<String, f64>,
    pub items: Vec<Item>,
    pub comparisons: Vec<Comparison>,
    /// Roundings of every winding number that produced an integer.
    pub windings: Vec<WindingRecord>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Only recorded on request, so that reports stay reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Item {
    pub name: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Integer(i64),
    /// An integer obtained by rounding, with its rounding residual.
    Index { degree: i64, residual: f64 },
    Scalar(f64),
    Flag(bool),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

/// A computed value checked against an independent oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Comparison {
    pub name: String,
    pub value: f64,
    pub oracle: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WindingRecord {
    pub name: String,
    pub degree: i64,
    pub residual: f64,
}

/// Collects items and comparisons while an experiment runs.
#[derive(Debug, Default)]
pub struct Recorder {
    pub items: Vec<Item>,
    pub comparisons: Vec<Comparison>,
    pub windings: Vec<WindingRecord>,
}

fn finite(x: f64) -> f64 {
    // JSON has no NaN or infinity
    if x.is_finite() {
        x
    } else {
        f64::MAX.copysign(if x.is_nan() { 1.0 } else { x })
    }
}

impl Recorder {
    pub fn item(&mut self, name: impl Into<String>, value: Value) {
        self.items.push(Item { name: name.into(), value });
    }

    pub fn scalar(&mut self, name: impl Into<String>, x: f64) {
        self.item(name, Value::Scalar(finite(x)));
    }

    pub fn flag(&mut self, name: impl Into<String>, b: bool) {
        self.item(name, Value::Flag(b));
    }

    pub fn vector(&mut self, name: impl Into<String>, v: Vec<f64>) {
        self.item(name, Value::Vector(v.into_iter().map(finite).collect()));
    }

    pub fn matrix(&mut self, name: impl Into<String>, m: &nalgebra::DMatrix<f64>) {
        let rows = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| finite(m[(i, j)])).collect()).collect();
        self.item(name, Value::Matrix(rows));
    }

    pub fn index(&mut self, name: impl Into<String>, w: &coiso::maslov::Winding) {
        let name = name.into();
        self.windings.push(WindingRecord { name: name.clone(), degree: w.degree, residual: w.residual });
        self.item(name, Value::Index { degree: w.degree, residual: w.residual });
    }

    /// Records `|value − oracle| ≤ tolerance`.
    pub fn compare(&mut self, name: impl Into<String>, value: f64, oracle: f64, tolerance: f64) -> bool {
        let residual = (value - oracle).abs();
        let pass = residual <= tolerance;
        self.comparisons.push(Comparison {
            name: name.into(),
            value: finite(value),
            oracle: finite(oracle),
            residual: finite(residual),
            tolerance,
            pass,
        });
        pass
    }

    /// Records `value < bound`, with 0 as the oracle.
    pub fn bound(&mut self, name: impl Into<String>, value: f64, bound: f64) -> bool {
        let pass = value.abs() < bound;
        self.comparisons.push(Comparison {
            name: name.into(),
            value: finite(value),
            oracle: 0.0,
            residual: finite(value.abs()),
            tolerance: bound,
            pass,
        });
        pass
    }

    /// Records an exact integer check.
    pub fn exact(&mut self, name: impl Into<String>, value: i64, oracle: i64) -> bool {
        self.compare(name, value as f64, oracle as f64, 0.0)
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// The comparisons as CSV.
    pub fn comparisons_csv(&self) -> String {
        let mut s = String::from("name,value,oracle,residual,tolerance,pass\n");
        for c in &self.comparisons {
            s.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                c.name, c.value, c.oracle, c.residual, c.tolerance, c.pass
            ));
        }
        s
    }
}
