//! File formats: JSON problem specs and CSV price series
//!
//! The solvers are unit-agnostic: scaling θ, σ², and the discount
//! rate by the same time factor leaves every threshold and value
//! unchanged. Files are not unit-agnostic, because people quote
//! mean-reversion per day and discounting per annum in the same
//! breath. This module pins the convention at the boundary: a spec
//! file declares (or the caller passes) a [`TimeUnit`], and all rate-
//! like numbers are converted to the canonical per-year form before a
//! model or contract is built. Prices are never rescaled.
//!
//! Model specs are tagged JSON objects:
//!
//! ```json
//! {"type": "ou", "theta": 68.69, "mu": 30.99, "sigma": 483.33}
//! {"type": "neg_gbm", "mu": 0.02, "sigma": 0.3}
//! {"type": "stack", "D": 20.0, "d": 1.0, "b": 1.0, "inner": {"type": "bm"}}
//! ```
//!
//! and contracts mirror their symbols:
//!
//! ```json
//! {"x_star": 100.0, "p_c": 25.0, "K_c": 25.0, "rate": 0.03, "A": 0.9999}
//! ```
//!
//! CSV ingestion expects two columns, an ISO-8601 timestamp and a
//! price, with an optional header row and a configurable delimiter.
//! Parse failures name the offending row.

use std::fmt;
use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use crate::calibrate::PriceSeries;
use crate::diffusion::{DiffusionModel, Imbalance};
use crate::error::{Error, Result};
use crate::payoff::ContractParams;
use serde::{Deserialize, Serialize};

/// Calendar-day convention for rate conversion: a year is 365 days,
/// matching how per-annum discount rates are broken into daily ones
/// throughout this crate.
pub const DAYS_PER_YEAR: f64 = 365.0;

/// The time unit rate-like numbers in a file are quoted in.
///
/// `Day` is the default because imbalance data is daily once
/// averaged; everything is converted to per-year form internally.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    #[default]
    Day,
    Year,
}

impl TimeUnit {
    /// Multiplier turning a rate in this unit into a per-year rate.
    pub fn rate_factor(self) -> f64 {
        match self {
            TimeUnit::Day => DAYS_PER_YEAR,
            TimeUnit::Year => 1.0,
        }
    }

    /// Multiplier turning a volatility in this unit into per-√year.
    pub fn vol_factor(self) -> f64 {
        self.rate_factor().sqrt()
    }
}

impl fmt::Display for TimeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeUnit::Day => "day",
            TimeUnit::Year => "year",
        })
    }
}

impl FromStr for TimeUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "day" | "daily" => Ok(TimeUnit::Day),
            "year" | "annual" | "yearly" => Ok(TimeUnit::Year),
            other => Err(Error::Data(format!("unknown time unit {other:?}"))),
        }
    }
}

/// Inner imbalance process of a stack spec.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InnerSpec {
    Bm,
    Ou { theta: f64 },
}

/// A price model as written in a spec file, in file units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    Ou {
        theta: f64,
        mu: f64,
        sigma: f64,
    },
    NegGbm {
        mu: f64,
        sigma: f64,
    },
    Stack {
        #[serde(rename = "D")]
        floor: f64,
        d: f64,
        b: f64,
        inner: InnerSpec,
    },
}

impl ModelSpec {
    /// Builds the model, converting rate-like fields from the file
    /// unit to per-year. Price-like fields (μ, D, d) and the
    /// dimensionless slope b pass through unchanged.
    pub fn to_model(&self, unit: TimeUnit) -> Result<DiffusionModel> {
        let rf = unit.rate_factor();
        let vf = unit.vol_factor();
        match *self {
            ModelSpec::Ou { theta, mu, sigma } => DiffusionModel::ou(theta * rf, mu, sigma * vf),
            ModelSpec::NegGbm { mu, sigma } => DiffusionModel::neg_gbm(mu * rf, sigma * vf),
            ModelSpec::Stack { floor, d, b, inner } => {
                let inner = match inner {
                    InnerSpec::Bm => Imbalance::Brownian,
                    InnerSpec::Ou { theta } => Imbalance::Ou { theta: theta * rf },
                };
                DiffusionModel::stack(floor, d, b, inner)
            }
        }
    }
}

/// A reserve contract as written in a spec file, in file units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractSpec {
    pub x_star: f64,
    pub p_c: f64,
    #[serde(rename = "K_c")]
    pub k_c: f64,
    pub rate: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

impl ContractSpec {
    /// Builds the contract with the rate converted to per-year.
    /// `waive_s2` skips the sustainability check S2* for callers that
    /// explicitly asked to study an unsustainable configuration.
    pub fn to_contract(&self, unit: TimeUnit, waive_s2: bool) -> Result<ContractParams> {
        let rate = self.rate * unit.rate_factor();
        if waive_s2 {
            ContractParams::new_unchecked(self.x_star, self.p_c, self.k_c, rate, self.a)
        } else {
            ContractParams::new(self.x_star, self.p_c, self.k_c, rate, self.a)
        }
    }
}

/// A full valuation problem: model plus contract, sharing one unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub model: ModelSpec,
    pub contract: ContractSpec,
}

/// Parses a JSON model spec, mapping syntax errors to data errors.
pub fn parse_model_spec(json: &str) -> Result<ModelSpec> {
    serde_json::from_str(json).map_err(|e| Error::Data(format!("model spec: {e}")))
}

/// Parses a JSON contract spec.
pub fn parse_contract_spec(json: &str) -> Result<ContractSpec> {
    serde_json::from_str(json).map_err(|e| Error::Data(format!("contract spec: {e}")))
}

/// Parses a JSON problem spec ({"model": …, "contract": …}).
pub fn parse_problem_spec(json: &str) -> Result<ProblemSpec> {
    serde_json::from_str(json).map_err(|e| Error::Data(format!("problem spec: {e}")))
}

/// Reads a two-column (timestamp, price) CSV file. The header row is
/// detected by attempting to parse the first row; the sampling
/// interval is inferred from the first two timestamps.
pub fn read_price_csv(path: &Path, delimiter: u8) -> Result<PriceSeries> {
    let file = File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    read_price_csv_from(file, delimiter)
}

/// Reader-based variant of [`read_price_csv`] for callers that hold
/// bytes rather than a path.
pub fn read_price_csv_from<R: std::io::Read>(reader: R, delimiter: u8) -> Result<PriceSeries> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut timestamps: Vec<i64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (idx, record) in csv_reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Data(format!("row {row}: {e}")))?;
        if record.len() < 2 {
            return Err(Error::Data(format!(
                "row {row}: expected two columns (timestamp, price), got {}",
                record.len()
            )));
        }
        let ts_field = &record[0];
        let ts = match parse_timestamp(ts_field) {
            Some(ts) => ts,
            None if row == 1 => continue, // header row
            None => {
                return Err(Error::Data(format!(
                    "row {row}: cannot parse timestamp {ts_field:?}"
                )))
            }
        };
        let value: f64 = record[1].parse().map_err(|_| {
            Error::Data(format!("row {row}: cannot parse price {:?}", &record[1]))
        })?;
        if let Some(&prev) = timestamps.last() {
            if ts <= prev {
                return Err(Error::Data(format!(
                    "row {row}: timestamp does not increase (prev {prev}, this {ts})"
                )));
            }
        }
        timestamps.push(ts);
        values.push(value);
    }
    if timestamps.len() < 2 {
        return Err(Error::Data(format!(
            "need at least two data rows to infer the sampling interval, got {}",
            timestamps.len()
        )));
    }
    let interval = timestamps[1] - timestamps[0];
    let interval: u32 = interval
        .try_into()
        .map_err(|_| Error::Data(format!("sampling interval {interval} s is out of range")))?;
    PriceSeries::new(timestamps, values, interval)
}

/// Accepts RFC 3339 ("2012-06-01T00:15:00Z", offsets allowed), the
/// common header-less forms without zone (taken as UTC), a bare date,
/// and raw Unix seconds (any all-digit field).
fn parse_timestamp(s: &str) -> Option<i64> {
    let s = s.trim();
    if !s.is_empty() && s.chars().all(|ch| ch.is_ascii_digit()) {
        return s.parse::<i64>().ok();
    }
    if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"] {
        if let Ok(naive) = chrono::NaiveDateTime::parse_from_str(s, fmt) {
            return Some(naive.and_utc().timestamp());
        }
    }
    if let Ok(date) = chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(date.and_hms_opt(0, 0, 0)?.and_utc().timestamp());
    }
    None
}
