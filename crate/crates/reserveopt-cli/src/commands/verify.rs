//! `reserveopt verify`: certify a candidate lifetime solution.
//!
//! The candidate is a pair (y*, x̌): the lifetime value at the
//! exercise level and the purchase threshold. It can come from a
//! `reserveopt value --mode lifetime` payload via `--solution`, or be
//! given directly with `--y-star` and `--x-check`. Verification runs
//! the fixed-point checks: x̌ must maximize the one-cycle operator
//! ratio, and y* must reproduce itself through the scalar identity.
//! Both residuals are held to `--tol`. A rejected candidate exits
//! with code 3.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use reserveopt::{lifetime_verify, make_eigenpair};

use crate::input::{load_text, ProblemArgs};
use crate::manifest::{emit, RunManifest};
use crate::{Cli, CmdResult, Failure};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    /// Candidate payload from `value --mode lifetime`: file path or inline JSON
    #[arg(long, value_name = "SPEC")]
    pub solution: Option<String>,

    /// Candidate lifetime value at the exercise level
    #[arg(long, allow_negative_numbers = true, requires = "x_check", conflicts_with = "solution")]
    pub y_star: Option<f64>,

    /// Candidate purchase threshold
    #[arg(long, allow_negative_numbers = true, requires = "y_star", conflicts_with = "solution")]
    pub x_check: Option<f64>,

    /// Write the report here instead of stdout (adds a manifest sidecar)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(cli: &Cli, args: &VerifyArgs) -> CmdResult<()> {
    let problem = args.problem.resolve(cli.time_unit)?;
    let pair = make_eigenpair(&problem.model, problem.contract.rate)?;

    let mut inputs = problem.inputs;
    let (y_star, x_check, candidate_source) = match (&args.solution, args.y_star, args.x_check) {
        (Some(spec), None, None) => {
            let loaded = load_text(spec, "solution")?;
            let doc: serde_json::Value = serde_json::from_str(&loaded.text)
                .map_err(|e| Failure::Data(format!("solution is not valid JSON: {e}")))?;
            let source = loaded.digest.source.clone();
            inputs.push(loaded.digest);
            let y = doc.get("y_star").and_then(|v| v.as_f64()).ok_or_else(|| {
                Failure::Usage(
                    "solution has no numeric y_star field; verification applies to lifetime payloads"
                        .into(),
                )
            })?;
            let x = doc.get("x_check").and_then(|v| v.as_f64()).ok_or_else(|| {
                Failure::Usage("solution has no numeric x_check field".into())
            })?;
            (y, x, source)
        }
        (None, Some(y), Some(x)) => (y, x, "<flags>".to_string()),
        _ => {
            return Err(Failure::Usage(
                "give either --solution, or both --y-star and --x-check".into(),
            ))
        }
    };

    let report = lifetime_verify(&pair, &problem.contract, y_star, x_check)?;
    let pass = report.max_ratio_defect <= cli.tol && report.fixed_point_residual <= cli.tol;

    let doc = json!({
        "y_star": y_star,
        "x_check": x_check,
        "max_ratio_defect": report.max_ratio_defect,
        "fixed_point_residual": report.fixed_point_residual,
        "tol": cli.tol,
        "pass": pass,
    });
    let config = json!({
        "candidate_source": candidate_source,
        "y_star": y_star,
        "x_check": x_check,
        "tol": cli.tol,
        "time_unit": cli.time_unit.to_string(),
        "force": args.problem.force,
        "model": problem.model_spec,
        "contract": problem.contract_spec,
    });
    let manifest = RunManifest::new("verify", config, inputs);
    let payload = serde_json::to_string_pretty(&doc).expect("JSON payload") + "\n";
    emit(&payload, args.output.as_deref(), &manifest)?;

    if pass {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "candidate rejected: ratio defect {}, fixed-point residual {}, tolerance {}",
            report.max_ratio_defect, report.fixed_point_residual, cli.tol
        )))
    }
}
