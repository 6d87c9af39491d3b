//! Loading of model and contract specs from files or inline JSON.
//!
//! Every spec-valued argument accepts either a file path or a literal
//! JSON object (anything whose first non-blank character is `{`).
//! Both forms are digested for the run manifest, so a run remains
//! reproducible whether its specs lived on disk or on the command
//! line.

use std::fs;
use std::path::Path;

use clap::Args;
use reserveopt::{
    parse_contract_spec, parse_model_spec, parse_problem_spec, ContractParams, ContractSpec,
    DiffusionModel, ModelSpec, TimeUnit,
};

use crate::manifest::{sha256_hex, InputDigest};
use crate::{CmdResult, Failure};

/// Raw text of one input plus its provenance entry.
pub struct LoadedText {
    pub text: String,
    pub digest: InputDigest,
}

/// Reads an argument that is either inline JSON or a file path.
pub fn load_text(arg: &str, label: &str) -> CmdResult<LoadedText> {
    if arg.trim_start().starts_with('{') {
        return Ok(LoadedText {
            digest: InputDigest {
                source: format!("<inline {label}>"),
                sha256: sha256_hex(arg.as_bytes()),
            },
            text: arg.to_string(),
        });
    }
    let text = fs::read_to_string(arg)
        .map_err(|e| Failure::Data(format!("cannot read {label} {arg}: {e}")))?;
    Ok(LoadedText {
        digest: InputDigest { source: arg.to_string(), sha256: sha256_hex(text.as_bytes()) },
        text,
    })
}

/// Digest entry for a plain data file (no inline form).
pub fn digest_file(path: &Path) -> CmdResult<InputDigest> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
    Ok(InputDigest { source: path.display().to_string(), sha256: sha256_hex(&bytes) })
}

// ---- problem arguments ----

/// The shared model-plus-contract argument group. A problem is given
/// either as two specs (`--model`, `--contract`) or as one combined
/// `--problem` document; each spec may be a file path or inline JSON.
#[derive(Args, Debug)]
pub struct ProblemArgs {
    /// Model spec: JSON file path or inline object
    #[arg(long, value_name = "SPEC")]
    pub model: Option<String>,

    /// Contract spec: JSON file path or inline object
    #[arg(long, value_name = "SPEC")]
    pub contract: Option<String>,

    /// Combined problem spec {"model": .., "contract": ..}
    #[arg(long, value_name = "SPEC", conflicts_with_all = ["model", "contract"])]
    pub problem: Option<String>,

    /// Proceed even when the contract violates sustainability S2*
    #[arg(long)]
    pub force: bool,
}

/// A fully resolved problem: parsed specs, canonical per-year model
/// and contract, and the digests of whatever was read to build them.
pub struct Problem {
    pub model_spec: ModelSpec,
    pub contract_spec: ContractSpec,
    pub model: DiffusionModel,
    pub contract: ContractParams,
    pub inputs: Vec<InputDigest>,
}

impl ProblemArgs {
    /// Loads, parses, and converts the problem in the given time unit.
    /// Sustainability S2* is enforced at contract construction unless
    /// `--force` was passed.
    pub fn resolve(&self, unit: TimeUnit) -> CmdResult<Problem> {
        let (model_spec, contract_spec, inputs) = match (&self.problem, &self.model, &self.contract)
        {
            (Some(p), None, None) => {
                let loaded = load_text(p, "problem spec")?;
                let spec = parse_problem_spec(&loaded.text)?;
                (spec.model, spec.contract, vec![loaded.digest])
            }
            (None, Some(m), Some(c)) => {
                let lm = load_text(m, "model spec")?;
                let lc = load_text(c, "contract spec")?;
                let ms = parse_model_spec(&lm.text)?;
                let cs = parse_contract_spec(&lc.text)?;
                (ms, cs, vec![lm.digest, lc.digest])
            }
            _ => {
                return Err(Failure::Usage(
                    "give either --problem, or both --model and --contract".into(),
                ))
            }
        };
        let model = model_spec.to_model(unit)?;
        let contract = contract_spec.to_contract(unit, self.force)?;
        Ok(Problem { model_spec, contract_spec, model, contract, inputs })
    }
}

/// JSON view of a resolved contract in canonical per-year units, used
/// by command payloads and manifests.
pub fn contract_json(c: &ContractParams) -> serde_json::Value {
    serde_json::json!({
        "x_star": c.x_star,
        "p_c": c.p_c,
        "K_c": c.k_c,
        "rate_per_year": c.rate,
        "A": c.a,
        "s2_star_waived": c.s2_overridden(),
    })
}
