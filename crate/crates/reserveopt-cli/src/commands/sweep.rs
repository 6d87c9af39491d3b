//! `reserveopt sweep`: evaluate a family of contracts along one axis.
//!
//! The grid varies one quantity of the contract template: the exercise
//! level `x-star`, the `total-premium` (both legs scaled, split
//! preserved), the `split` (p_c set to the grid value, K_c keeping the
//! total), or the purchase `threshold` of a fixed contract. An
//! optional `--x-star` list crosses the grid with several exercise
//! levels, one block per level.
//!
//! Output is CSV, one row per grid point, sorted by exercise level and
//! then by the axis value. Rows whose contract leaves the admissible
//! region (sustainability S2*, negative premium legs) are kept and
//! marked `excluded` rather than dropped; rows where the solver fails
//! are marked `error` with a note on stderr. Grid points are computed
//! concurrently; ordering is unaffected.

use std::path::PathBuf;
use std::thread;

use clap::{Args, ValueEnum};
use serde_json::json;

use reserveopt::{
    lifetime_construct, make_eigenpair, threshold_policy_value, ContractParams, ContractSpec,
    EigenPair, TimeUnit,
};

use crate::input::ProblemArgs;
use crate::manifest::{emit, RunManifest};
use crate::{Cli, CmdResult, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// Exercise level x*
    #[value(alias = "x_star")]
    XStar,
    /// Total premium p_c + K_c, scaled with the template's split
    #[value(alias = "total_premium")]
    TotalPremium,
    /// Up-front leg p_c, with K_c keeping the template's total
    Split,
    /// Purchase threshold of the fixed template contract
    Threshold,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::XStar => "x-star",
            Axis::TotalPremium => "total-premium",
            Axis::Split => "split",
            Axis::Threshold => "threshold",
        }
    }
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    /// Quantity the grid varies
    #[arg(long, value_enum)]
    pub axis: Axis,

    /// Grid: comma-separated values, or LO:HI:N for N evenly spaced points
    #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
    pub grid: String,

    /// Exercise levels crossed with the grid (defaults to the template's x*)
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub x_star: Option<String>,

    /// Evaluation state for the threshold axis (defaults to the exercise level)
    #[arg(long, allow_negative_numbers = true)]
    pub at: Option<f64>,

    /// Write the CSV here instead of stdout (adds a manifest sidecar)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

// ---- grid parsing ----

/// Parses a grid argument: either `LO:HI:N` (N evenly spaced points,
/// endpoints included) or a comma-separated list. The result is sorted
/// ascending; an empty or malformed grid is a usage error.
fn parse_grid(s: &str) -> CmdResult<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Failure::Usage("the grid is empty".into()));
    }
    let mut values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Failure::Usage(format!("grid {s:?} is not of the form LO:HI:N")));
        }
        let lo: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("grid bound {:?} is not a number", parts[0])))?;
        let hi: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("grid bound {:?} is not a number", parts[1])))?;
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("grid count {:?} is not an integer", parts[2])))?;
        if n < 2 {
            return Err(Failure::Usage(format!("grid count must be at least 2, got {n}")));
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    } else {
        let mut vals = Vec::new();
        for piece in s.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                return Err(Failure::Usage(format!("grid {s:?} has an empty entry")));
            }
            vals.push(piece.parse::<f64>().map_err(|_| {
                Failure::Usage(format!("grid entry {piece:?} is not a number"))
            })?);
        }
        vals
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Failure::Usage("grid values must be finite".into()));
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite grid values"));
    Ok(values)
}

// ---- row computation ----

#[derive(Clone, Copy)]
struct Job {
    x_star: f64,
    g: f64,
}

enum RowBody {
    Value { contract: ContractParams, y_star: f64, x_check: f64, regime: String },
    Policy { contract: ContractParams, at: f64, value: f64 },
    Excluded { reason: String },
    Error { reason: String },
}

struct Row {
    x_star: f64,
    g: f64,
    body: RowBody,
}

/// The contract this grid point describes, before validation.
fn row_spec(base: &ContractSpec, axis: Axis, job: &Job) -> ContractSpec {
    let mut spec = *base;
    spec.x_star = job.x_star;
    match axis {
        Axis::XStar | Axis::Threshold => {}
        Axis::TotalPremium => {
            let total = base.p_c + base.k_c;
            let scale = if total > 0.0 { job.g / total } else { f64::NAN };
            spec.p_c = base.p_c * scale;
            spec.k_c = base.k_c * scale;
        }
        Axis::Split => {
            let total = base.p_c + base.k_c;
            spec.p_c = job.g;
            spec.k_c = total - job.g;
        }
    }
    spec
}

fn compute_row(
    pair: &EigenPair,
    base: &ContractSpec,
    axis: Axis,
    unit: TimeUnit,
    at: Option<f64>,
    job: Job,
) -> Row {
    let spec = row_spec(base, axis, &job);
    let contract = match spec.to_contract(unit, false) {
        Ok(c) => c,
        Err(e) => {
            return Row { x_star: job.x_star, g: job.g, body: RowBody::Excluded { reason: e.to_string() } }
        }
    };
    let body = match axis {
        Axis::Threshold => {
            let eval = match contract.exercise_state(pair.model()) {
                Ok(z) => at.unwrap_or(z),
                Err(e) => return Row { x_star: job.x_star, g: job.g, body: RowBody::Error { reason: e.to_string() } },
            };
            match threshold_policy_value(pair, &contract, job.g, eval) {
                Ok(v) => RowBody::Policy { contract, at: eval, value: v },
                Err(e) => RowBody::Error { reason: e.to_string() },
            }
        }
        _ => match lifetime_construct(pair, &contract) {
            Ok(lt) => RowBody::Value {
                contract,
                y_star: lt.y_star(),
                x_check: lt.x_check(),
                regime: lt.regime().to_string(),
            },
            Err(e) => RowBody::Error { reason: e.to_string() },
        },
    };
    Row { x_star: job.x_star, g: job.g, body }
}

/// Shortest round-trip decimal form, the one float format every CSV
/// consumer reparses exactly.
fn num(v: f64) -> String {
    format!("{v}")
}

pub fn run(cli: &Cli, args: &SweepArgs) -> CmdResult<()> {
    let problem = args.problem.resolve(cli.time_unit)?;
    let pair = make_eigenpair(&problem.model, problem.contract.rate)?;
    let grid = parse_grid(&args.grid)?;
    if args.at.is_some() && args.axis != Axis::Threshold {
        return Err(Failure::Usage("--at applies to the threshold axis only".into()));
    }
    let x_stars = match &args.x_star {
        None => vec![problem.contract_spec.x_star],
        Some(_) if args.axis == Axis::XStar => {
            return Err(Failure::Usage(
                "--x-star cannot be combined with the x-star axis; put the levels in --grid".into(),
            ))
        }
        Some(list) => parse_grid(list)?,
    };
    if args.axis == Axis::TotalPremium && problem.contract_spec.p_c + problem.contract_spec.k_c <= 0.0
    {
        return Err(Failure::Usage(
            "the total-premium axis needs a template with a positive total premium to scale".into(),
        ));
    }

    // one job per (exercise level, grid point), already in output order
    let jobs: Vec<Job> = x_stars
        .iter()
        .flat_map(|&xs| {
            grid.iter().map(move |&g| Job {
                x_star: if args.axis == Axis::XStar { g } else { xs },
                g,
            })
        })
        .collect();

    let workers = thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(jobs.len()).max(1);
    let chunk = jobs.len().div_ceil(workers);
    let base = problem.contract_spec;
    let rows: Vec<Row> = thread::scope(|scope| {
        let pair = &pair;
        let base = &base;
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|slice| {
                scope.spawn(move || {
                    slice
                        .iter()
                        .map(|j| compute_row(pair, base, args.axis, cli.time_unit, args.at, *j))
                        .collect::<Vec<Row>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    });

    // ---- CSV assembly ----

    let mut wtr = csv::Writer::from_writer(Vec::new());
    let threshold_axis = args.axis == Axis::Threshold;
    if threshold_axis {
        wtr.write_record(["x_star", "threshold", "evaluation_state", "policy_value", "status"])
    } else {
        wtr.write_record([
            "x_star",
            "p_c",
            "k_c",
            "total_premium",
            "y_star",
            "x_check",
            "regime",
            "status",
        ])
    }
    .map_err(|e| Failure::Data(format!("CSV write failed: {e}")))?;

    let (mut n_ok, mut n_excluded, mut n_error) = (0usize, 0usize, 0usize);
    for row in &rows {
        let record: Vec<String> = match &row.body {
            RowBody::Value { contract, y_star, x_check, regime } => {
                n_ok += 1;
                vec![
                    num(contract.x_star),
                    num(contract.p_c),
                    num(contract.k_c),
                    num(contract.total_premium()),
                    num(*y_star),
                    num(*x_check),
                    regime.clone(),
                    "ok".into(),
                ]
            }
            RowBody::Policy { contract, at, value } => {
                n_ok += 1;
                vec![num(contract.x_star), num(row.g), num(*at), num(*value), "ok".into()]
            }
            RowBody::Excluded { reason } => {
                n_excluded += 1;
                eprintln!("row x_star={} {}={}: excluded: {reason}", row.x_star, args.axis.name(), row.g);
                if threshold_axis {
                    vec![num(row.x_star), num(row.g), String::new(), String::new(), "excluded".into()]
                } else {
                    let spec = row_spec(&base, args.axis, &Job { x_star: row.x_star, g: row.g });
                    vec![
                        num(spec.x_star),
                        num(spec.p_c),
                        num(spec.k_c),
                        num(spec.p_c + spec.k_c),
                        String::new(),
                        String::new(),
                        String::new(),
                        "excluded".into(),
                    ]
                }
            }
            RowBody::Error { reason } => {
                n_error += 1;
                eprintln!("row x_star={} {}={}: {reason}", row.x_star, args.axis.name(), row.g);
                if threshold_axis {
                    vec![num(row.x_star), num(row.g), String::new(), String::new(), "error".into()]
                } else {
                    let spec = row_spec(&base, args.axis, &Job { x_star: row.x_star, g: row.g });
                    vec![
                        num(spec.x_star),
                        num(spec.p_c),
                        num(spec.k_c),
                        num(spec.p_c + spec.k_c),
                        String::new(),
                        String::new(),
                        String::new(),
                        "error".into(),
                    ]
                }
            }
        };
        wtr.write_record(&record).map_err(|e| Failure::Data(format!("CSV write failed: {e}")))?;
    }
    let bytes = wtr.into_inner().map_err(|e| Failure::Data(format!("CSV write failed: {e}")))?;
    let payload = String::from_utf8(bytes).expect("CSV output is UTF-8");

    eprintln!(
        "sweep over {}: {} rows ({n_ok} ok, {n_excluded} excluded, {n_error} error)",
        args.axis.name(),
        rows.len()
    );

    let config = json!({
        "axis": args.axis.name(),
        "grid": grid,
        "x_star_levels": x_stars,
        "evaluation_state": args.at,
        "time_unit": cli.time_unit.to_string(),
        "force": args.problem.force,
        "model": problem.model_spec,
        "contract_template": problem.contract_spec,
    });
    let manifest = RunManifest::new("sweep", config, problem.inputs);
    emit(&payload, args.output.as_deref(), &manifest)
}
