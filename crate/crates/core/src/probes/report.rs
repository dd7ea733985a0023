//! Experiment reports and log-log least-squares fits.

use serde::Serialize;

use crate::error::{Error, Result};

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

pub fn fit_line(name: &str, x: &[f64], y: &[f64]) -> Result<Fit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter(format!("fit {name}: need at least two points")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("fit {name}: non-finite input")));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(format!("fit {name}: all x equal")));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (slope * a + intercept)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    // a flat series is fitted exactly by a flat line
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(Fit { name: name.to_string(), slope, intercept, r_squared, residuals })
}

/// Fit of `ln y` against `ln x`; both must be positive.
pub fn fit_loglog(name: &str, x: &[f64], y: &[f64]) -> Result<Fit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter(format!("log fit {name}: non-positive input")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_line(name, &lx, &ly)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Number(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// Worst-case ratio of measurements to a closed-form bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundComparison {
    pub bound: String,
    pub max_ratio: f64,
    pub tolerance: f64,
    pub within: bool,
}

/// Measurements of one experiment, serialisable as JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub experiment: String,
    pub grid: String,
    pub parameters: Vec<(String, Value)>,
    pub columns: Vec<String>,
    /// `None` marks a cell that does not apply to its row.
    pub rows: Vec<Vec<Option<f64>>>,
    pub fits: Vec<Fit>,
    pub comparisons: Vec<BoundComparison>,
    pub seed: Option<u64>,
    pub wall_clock_seconds: f64,
}

impl ProbeReport {
    pub fn new(experiment: &str, grid: String, columns: &[&str]) -> Self {
        Self {
            experiment: experiment.to_string(),
            grid,
            parameters: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fits: Vec::new(),
            comparisons: Vec::new(),
            seed: None,
            wall_clock_seconds: 0.0,
        }
    }

    pub fn param(&mut self, name: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.push((name.to_string(), value.into()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a column, skipping empty cells.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let Some(j) = self.column_index(name) else { return Vec::new() };
        self.rows.iter().filter_map(|r| r[j]).collect()
    }

    pub fn fit(&self, name: &str) -> Option<&Fit> {
        self.fits.iter().find(|f| f.name == name)
    }

    pub fn comparison(&self, bound: &str) -> Option<&BoundComparison> {
        self.comparisons.iter().find(|c| c.bound == bound)
    }

    pub fn parameter(&self, name: &str) -> Option<&Value> {
        self.parameters.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}
