//! Parameter sweeps over the state families.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sig12, CliError};
use crate::fef::{self, OptimizerConfig};
use crate::states::{self, FamilyParams};
use crate::witness::{self, Verdict};

/// Largest tolerated gap between the closed form and the numerically
/// evaluated expectation on a grid point.
pub const AGREEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Isotropic,
    Werner,
    Mems,
    Discord,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Isotropic => "isotropic",
            Self::Werner => "werner",
            Self::Mems => "mems",
            Self::Discord => "discord",
        }
    }

    pub fn parameter_name(self) -> &'static str {
        match self {
            Self::Isotropic => "beta",
            Self::Werner => "v",
            Self::Mems => "concurrence",
            Self::Discord => "a",
        }
    }

    /// Admissible parameter interval at local dimension `d`.
    pub fn interval(self, d: usize) -> (f64, f64) {
        match self {
            Self::Isotropic => (states::isotropic_beta_min(d), 1.0),
            _ => (0.0, 1.0),
        }
    }

    /// Family member at parameter `x`. Werner states use uniform amplitudes `1/sqrt(d)`.
    pub fn params(self, d: usize, x: f64) -> FamilyParams {
        match self {
            Self::Isotropic => FamilyParams::Isotropic { d, beta: x },
            Self::Werner => FamilyParams::GeneralizedWerner {
                d,
                v: x,
                alphas: vec![1.0 / (d as f64).sqrt(); d],
            },
            Self::Mems => FamilyParams::Mems { concurrence: x },
            Self::Discord => FamilyParams::Discord { a: x },
        }
    }

    /// Closed-form witness expectation at parameter `x`.
    pub fn closed_form(self, d: usize, x: f64) -> crate::Result<f64> {
        match self.params(d, x) {
            FamilyParams::Isotropic { d, beta } => witness::isotropic_expectation(d, beta),
            FamilyParams::GeneralizedWerner { d, v, alphas } => witness::werner_expectation(d, v, &alphas),
            FamilyParams::Mems { concurrence } => witness::mems_expectation(concurrence),
            FamilyParams::Discord { a } => witness::discord_expectation(a),
        }
    }

    fn fixed_dimension(self) -> Option<usize> {
        match self {
            Self::Mems | Self::Discord => Some(2),
            _ => None,
        }
    }
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "isotropic" => Ok(Self::Isotropic),
            "werner" => Ok(Self::Werner),
            "mems" => Ok(Self::Mems),
            "discord" => Ok(Self::Discord),
            other => Err(CliError::Usage(format!(
                "unknown family '{other}' (expected isotropic, werner, mems or discord)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(CliError::Usage(format!("unknown format '{other}' (csv or json)"))),
        }
    }
}

/// One grid point of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub family: String,
    pub d: usize,
    pub parameter_name: String,
    pub parameter_value: f64,
    pub witness_expectation: f64,
    pub fef_value: Option<f64>,
    pub fef_method: Option<String>,
    pub verdict: String,
}

pub const CSV_HEADER: [&str; 8] = [
    "family",
    "d",
    "parameter_name",
    "parameter_value",
    "witness_expectation",
    "fef_value",
    "fef_method",
    "verdict",
];

#[derive(Debug, Clone)]
pub struct ScanRequest {
    pub family: Family,
    pub d: usize,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    pub with_fef: bool,
    pub config: OptimizerConfig,
}

impl ScanRequest {
    /// Grid `from, from + step, ...` up to `to`, clipped to `to` against rounding.
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        if let Some(fixed) = self.family.fixed_dimension() {
            if self.d != fixed {
                return Err(CliError::Usage(format!(
                    "family {} is defined for d = {fixed} only",
                    self.family.as_str()
                )));
            }
        }
        if self.d < 2 {
            return Err(CliError::Usage(format!("d must be at least 2, got {}", self.d)));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(CliError::Usage(format!("step must be positive, got {}", self.step)));
        }
        if !(self.from.is_finite() && self.to.is_finite()) || self.from > self.to {
            return Err(CliError::Usage(format!("bad range [{}, {}]", self.from, self.to)));
        }
        let (lo, hi) = self.family.interval(self.d);
        if self.from < lo - 1e-12 || self.to > hi + 1e-12 {
            return Err(CliError::Usage(format!(
                "range [{}, {}] leaves the admissible {} interval [{lo}, {hi}]",
                self.from,
                self.to,
                self.family.parameter_name()
            )));
        }
        let count = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|k| (self.from + k as f64 * self.step).min(self.to).clamp(lo, hi))
            .collect())
    }
}

fn evaluate(req: &ScanRequest, x: f64) -> Result<ScanRow, CliError> {
    let internal = |e: crate::Error| CliError::Usage(e.to_string());
    let rho = req.family.params(req.d, x).build().map_err(internal)?;
    let numeric = witness::witness_expectation(&rho);
    let closed = req.family.closed_form(req.d, x).map_err(internal)?;
    if (numeric - closed).abs() > AGREEMENT_TOL {
        return Err(CliError::Internal(format!(
            "{} at {} = {x}: numeric {numeric} vs closed form {closed}",
            req.family.as_str(),
            req.family.parameter_name()
        )));
    }
    let fef = if req.with_fef {
        Some(fef::fef(&rho, &req.config).map_err(internal)?)
    } else {
        None
    };
    Ok(ScanRow {
        family: req.family.as_str().into(),
        d: req.d,
        parameter_name: req.family.parameter_name().into(),
        parameter_value: x,
        witness_expectation: numeric,
        fef_value: fef.as_ref().map(|f| f.value),
        fef_method: fef.as_ref().map(|f| f.method.as_str().to_string()),
        verdict: Verdict::from_expectation(numeric).as_str().into(),
    })
}

/// Evaluates every grid point; rows come back ordered by parameter value.
pub fn scan(req: &ScanRequest) -> Result<Vec<ScanRow>, CliError> {
    let grid = req.grid()?;
    grid.par_iter().map(|&x| evaluate(req, x)).collect()
}

fn rounded(row: &ScanRow) -> ScanRow {
    ScanRow {
        parameter_value: sig12(row.parameter_value),
        witness_expectation: sig12(row.witness_expectation),
        fef_value: row.fef_value.map(sig12),
        ..row.clone()
    }
}

/// Writes rows with reals rounded to 12 significant digits.
pub fn write_rows<W: Write>(rows: &[ScanRow], format: OutputFormat, mut out: W) -> std::io::Result<()> {
    let rows: Vec<ScanRow> = rows.iter().map(rounded).collect();
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in &rows {
                w.write_record([
                    r.family.clone(),
                    r.d.to_string(),
                    r.parameter_name.clone(),
                    r.parameter_value.to_string(),
                    r.witness_expectation.to_string(),
                    r.fef_value.map(|v| v.to_string()).unwrap_or_default(),
                    r.fef_method.clone().unwrap_or_default(),
                    r.verdict.clone(),
                ])?;
            }
            w.flush()
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)
        }
    }
}

/// Parses rows written by [`write_rows`].
pub fn read_rows(text: &str, format: OutputFormat) -> Result<Vec<ScanRow>, CliError> {
    let bad = |e: String| CliError::Usage(format!("cannot parse scan output: {e}"));
    match format {
        OutputFormat::Json => serde_json::from_str(text).map_err(|e| bad(e.to_string())),
        OutputFormat::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            let header: Vec<String> = r
                .headers()
                .map_err(|e| bad(e.to_string()))?
                .iter()
                .map(String::from)
                .collect();
            if header != CSV_HEADER {
                return Err(bad(format!("unexpected header {header:?}")));
            }
            r.deserialize().map(|row| row.map_err(|e| bad(e.to_string()))).collect()
        }
    }
}
