//! `reserveopt simulate`: Monte Carlo check of a threshold policy
//! against its analytic value.
//!
//! The policy buys at the first passage of the state down to the
//! threshold and exercises at the exercise level; lifetime mode keeps
//! cycling with the degradation factor. The analytic comparator is
//! `threshold_policy_value` in single mode and the renewal chain of
//! hitting discounts in lifetime mode, or a user-supplied number via
//! `--analytic-value` (useful for testing the disagreement path).
//!
//! The payload reports both numbers, the standard error, and the
//! verdict; a human-readable comparison table goes to stderr. A
//! deviation beyond five standard errors plus the truncation bias
//! bound exits with code 3.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use reserveopt::{
    estimate_lifetime_value, estimate_single_value, hitting_discount, lifetime_construct,
    make_eigenpair, solve_single, threshold_policy_value, CaseTag, ContractParams, EigenPair,
    SimConfig,
};

use crate::commands::Mode;
use crate::input::{contract_json, ProblemArgs};
use crate::manifest::{emit, RunManifest};
use crate::{Cli, CmdResult, Failure};

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    /// Policy to estimate: one option or the lifetime renewal chain
    #[arg(long, value_enum, default_value_t = Mode::Single)]
    pub mode: Mode,

    /// Purchase threshold (defaults to the solver's optimal threshold)
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,

    /// Start state (defaults to the exercise level)
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,

    /// Time step, in --time-unit
    #[arg(long)]
    pub dt: f64,

    /// Simulated horizon, in --time-unit
    #[arg(long)]
    pub horizon: f64,

    /// Number of paths (antithetic runs pair them two per stream)
    #[arg(long)]
    pub paths: usize,

    /// Discounted-value floor below which a lifetime path stops cycling
    #[arg(long)]
    pub tail_cut: Option<f64>,

    /// Draw every path independently instead of antithetic pairing
    #[arg(long)]
    pub no_antithetic: bool,

    /// Compare against this value instead of the computed analytic one
    #[arg(long, allow_negative_numbers = true)]
    pub analytic_value: Option<f64>,

    /// Write the payload here instead of stdout (adds a manifest sidecar)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Lifetime value of the threshold policy from `x0`, composed from
/// hitting discounts: one cycle books (p_c - threshold) on purchase
/// and K_c on exercise, and the chain from the exercise level sums the
/// geometric tail with per-cycle factor A times the round-trip
/// discount.
fn chain_value(
    pair: &EigenPair,
    c: &ContractParams,
    z_star: f64,
    threshold: f64,
    x0: f64,
) -> reserveopt::Result<f64> {
    let d1 = hitting_discount(pair, z_star, threshold)?;
    let d2 = hitting_discount(pair, threshold, z_star)?;
    let rho = d1 * d2;
    let y_star = d1 * ((-threshold + c.p_c) + d2 * c.k_c) / (1.0 - c.a * rho);
    let d0 = hitting_discount(pair, x0, threshold)?;
    Ok(d0 * ((-threshold + c.p_c) + d2 * (c.k_c + c.a * y_star)))
}

pub fn run(cli: &Cli, args: &SimulateArgs) -> CmdResult<()> {
    let problem = args.problem.resolve(cli.time_unit)?;
    let pair = make_eigenpair(&problem.model, problem.contract.rate)?;
    let c = problem.contract;
    let z_star = c.exercise_state(&problem.model)?;

    // durations arrive in the session's time unit; the engine runs per-year
    let dt_years = args.dt / cli.time_unit.rate_factor();
    let horizon_years = args.horizon / cli.time_unit.rate_factor();
    let units = if args.no_antithetic { args.paths } else { args.paths / 2 };
    if units < 2 {
        return Err(Failure::Usage(format!(
            "{} paths give {units} independent units; the standard error needs at least 2",
            args.paths
        )));
    }
    let mut cfg = SimConfig::new(dt_years, horizon_years, args.paths, cli.seed)?;
    cfg.antithetic = !args.no_antithetic;
    if let Some(tc) = args.tail_cut {
        if !(tc.is_finite() && tc >= 0.0) {
            return Err(Failure::Usage(format!("tail cut must be finite and nonnegative, got {tc}")));
        }
        cfg.tail_cut = tc;
    }

    let threshold = match args.threshold {
        Some(t) => t,
        None => match args.mode {
            Mode::Single => {
                let sol = solve_single(&pair, &c)?;
                match (sol.case(), sol.x_check()) {
                    (CaseTag::A, Some(x)) => x,
                    (tag, _) => {
                        return Err(Failure::Data(format!(
                            "case {tag} has no attained optimal threshold; pass --threshold"
                        )))
                    }
                }
            }
            Mode::Lifetime => lifetime_construct(&pair, &c)?.x_check(),
        },
    };
    let x0 = args.x0.unwrap_or(z_star);

    let (analytic, analytic_source) = match args.analytic_value {
        Some(v) => (v, "user"),
        None => match args.mode {
            Mode::Single => (threshold_policy_value(&pair, &c, threshold, x0)?, "threshold-policy"),
            Mode::Lifetime => (chain_value(&pair, &c, z_star, threshold, x0)?, "renewal-chain"),
        },
    };

    let estimate = match args.mode {
        Mode::Single => estimate_single_value(&problem.model, &c, threshold, x0, &cfg)?,
        Mode::Lifetime => estimate_lifetime_value(&problem.model, &c, threshold, x0, &cfg)?,
    };

    let deviation = estimate.mean - analytic;
    let se_multiple = if estimate.stderr > 0.0 { deviation / estimate.stderr } else { f64::NAN };
    let band = 5.0 * estimate.stderr + estimate.truncation_bias_bound;
    let agrees = deviation.abs() <= band;

    // ---- human-readable comparison, stderr only ----

    eprintln!(
        "policy     {} at threshold {threshold}, start {x0}, {} paths ({units} units)",
        args.mode.name(),
        args.paths
    );
    eprintln!("analytic   {analytic} ({analytic_source})");
    eprintln!("simulated  {} +/- {} (1 se)", estimate.mean, estimate.stderr);
    eprintln!(
        "deviation  {deviation} = {se_multiple:.2} se; truncation bias bound {}",
        estimate.truncation_bias_bound
    );
    if agrees {
        eprintln!("verdict    agreement within 5 se");
    } else {
        eprintln!("verdict    DISAGREEMENT beyond 5 se");
    }

    let doc = json!({
        "mode": args.mode.name(),
        "threshold": threshold,
        "x0": x0,
        "analytic": analytic,
        "analytic_source": analytic_source,
        "estimate": estimate,
        "deviation": deviation,
        "se_multiple": se_multiple,
        "tolerance_se": 5.0,
        "agrees": agrees,
        "contract": contract_json(&c),
        "config": cfg,
    });
    let config = json!({
        "mode": args.mode.name(),
        "threshold": threshold,
        "x0": x0,
        "dt_years": dt_years,
        "horizon_years": horizon_years,
        "paths": args.paths,
        "seed": cli.seed,
        "antithetic": !args.no_antithetic,
        "tail_cut": cfg.tail_cut,
        "analytic_value": args.analytic_value,
        "time_unit": cli.time_unit.to_string(),
        "force": args.problem.force,
        "model": problem.model_spec,
        "contract": problem.contract_spec,
    });
    let manifest = RunManifest::new("simulate", config, problem.inputs);
    let payload = serde_json::to_string_pretty(&doc).expect("JSON payload") + "\n";
    emit(&payload, args.output.as_deref(), &manifest)?;

    if agrees {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "simulated value {} deviates from analytic {analytic} by {se_multiple:.2} se",
            estimate.mean
        )))
    }
}
