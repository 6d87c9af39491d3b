//! `reserveopt calibrate`: fit an Ornstein-Uhlenbeck model to a price
//! CSV.
//!
//! The input is a two-column CSV (timestamp, price) with an optional
//! header; the sampling interval is inferred from the first two rows.
//! `--daily-average` collapses sub-daily data to one mean per UTC day
//! first, `--truncate LO HI` then winsorizes spikes into the bounds.
//! The fit is reported in per-year units regardless of `--time-unit`,
//! which calibration does not use: the time scale comes from the
//! timestamps themselves.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use reserveopt::{daily_average, fit_ou_mle, read_price_csv, truncate, DAYS_PER_YEAR};

use crate::input::digest_file;
use crate::manifest::{emit, RunManifest};
use crate::{Cli, CmdResult, Failure};

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Two-column price CSV: timestamp, price
    #[arg(long, value_name = "CSV")]
    pub input: PathBuf,

    /// Field delimiter of the input
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,

    /// Collapse sub-daily observations to one mean per UTC day
    #[arg(long)]
    pub daily_average: bool,

    /// Winsorize prices into [LO, HI] before fitting
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub truncate: Option<Vec<f64>>,

    /// Write the fit here instead of stdout (adds a manifest sidecar)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(_cli: &Cli, args: &CalibrateArgs) -> CmdResult<()> {
    if !args.delimiter.is_ascii() {
        return Err(Failure::Usage(format!(
            "delimiter must be a single ASCII character, got {:?}",
            args.delimiter
        )));
    }
    let bounds = match &args.truncate {
        None => None,
        Some(v) => {
            let (lo, hi) = (v[0], v[1]);
            if !(lo < hi) {
                return Err(Failure::Usage(format!(
                    "truncation bounds must satisfy LO < HI, got {lo} and {hi}"
                )));
            }
            Some((lo, hi))
        }
    };

    let mut series = read_price_csv(&args.input, args.delimiter as u8)?;
    if args.daily_average {
        series = daily_average(&series)?;
    }
    if let Some((lo, hi)) = bounds {
        series = truncate(&series, lo, hi)?;
    }
    let dt_years = series.interval_seconds as f64 / 86_400.0 / DAYS_PER_YEAR;
    let fit = fit_ou_mle(&series, dt_years)?;

    let config = json!({
        "input": args.input.display().to_string(),
        "delimiter": args.delimiter.to_string(),
        "daily_average": args.daily_average,
        "truncate": bounds.map(|(lo, hi)| json!([lo, hi])),
        "interval_seconds": series.interval_seconds,
        "dt_years": dt_years,
    });
    let manifest = RunManifest::new("calibrate", config, vec![digest_file(&args.input)?]);
    let payload = serde_json::to_string_pretty(&fit).expect("JSON payload") + "\n";
    emit(&payload, args.output.as_deref(), &manifest)
}
