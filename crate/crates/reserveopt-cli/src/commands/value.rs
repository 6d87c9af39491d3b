//! `reserveopt value`: solve one valuation problem and print the
//! solution as JSON.
//!
//! The payload always carries the case tag, the sustainability report,
//! and the resolved contract; case A adds the optimal threshold and
//! the value at the evaluation state, lifetime mode adds the renewal
//! quantities (y*, regime, contraction bound, fixed-point residual).
//! Case C is reported as `"value": "infinite"` with exit code 0: an
//! unbounded value is an answer, not an error. Lifetime payloads are
//! accepted back by `reserveopt verify` unchanged.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use reserveopt::{check_sustainability, lifetime_construct, make_eigenpair, solve_single, CaseTag};

use crate::commands::Mode;
use crate::input::{contract_json, ProblemArgs};
use crate::manifest::{emit, RunManifest};
use crate::{Cli, CmdResult};

#[derive(Args, Debug)]
pub struct ValueArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    /// Problem to solve: one option or the lifetime renewal chain
    #[arg(long, value_enum, default_value_t = Mode::Single)]
    pub mode: Mode,

    /// State at which to evaluate the value (defaults to the exercise level)
    #[arg(long, allow_negative_numbers = true)]
    pub at: Option<f64>,

    /// Write the payload here instead of stdout (adds a manifest sidecar)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(cli: &Cli, args: &ValueArgs) -> CmdResult<()> {
    let problem = args.problem.resolve(cli.time_unit)?;
    let pair = make_eigenpair(&problem.model, problem.contract.rate)?;
    let sustainability = check_sustainability(&pair, &problem.contract)?;
    let solution = solve_single(&pair, &problem.contract)?;
    let z_star = problem.contract.exercise_state(&problem.model)?;
    let at = args.at.unwrap_or(z_star);

    let mut doc = json!({
        "case": solution.case().to_string(),
        "mode": args.mode.name(),
        "model": problem.model_spec,
        "time_unit": cli.time_unit.to_string(),
        "contract": contract_json(&problem.contract),
        "sustainability": sustainability,
        "evaluation_state": at,
    });
    let obj = doc.as_object_mut().expect("payload is an object");

    if solution.case() == CaseTag::C {
        obj.insert("value".into(), json!("infinite"));
    } else {
        match args.mode {
            Mode::Single => {
                obj.insert("value".into(), json!(solution.value_at(at)?));
                obj.insert("x_check".into(), json!(solution.x_check()));
                obj.insert("ratio_max".into(), json!(solution.ratio_max()));
            }
            Mode::Lifetime => {
                let lt = lifetime_construct(&pair, &problem.contract)?;
                obj.insert("value".into(), json!(lt.value_at(at)?));
                obj.insert("y_star".into(), json!(lt.y_star()));
                obj.insert("x_check".into(), json!(lt.x_check()));
                obj.insert("regime".into(), json!(lt.regime().to_string()));
                obj.insert("rho_bound".into(), json!(lt.rho_bound()));
                obj.insert("residual".into(), json!(lt.residual()));
            }
        }
    }

    let config = json!({
        "mode": args.mode.name(),
        "time_unit": cli.time_unit.to_string(),
        "evaluation_state": at,
        "force": args.problem.force,
        "model": problem.model_spec,
        "contract": problem.contract_spec,
    });
    let manifest = RunManifest::new("value", config, problem.inputs);
    let payload = serde_json::to_string_pretty(&doc).expect("JSON payload") + "\n";
    emit(&payload, args.output.as_deref(), &manifest)
}
