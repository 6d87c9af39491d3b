//! Price-stack models: stopping-set geometry and solvers
//!
//! A price stack maps a physical imbalance diffusion Z to the price
//! through the monotone transform X = f(Z) = D + d·e^{bZ}. All
//! quantities in this module live in the imbalance coordinate z; the
//! price is recovered through `DiffusionModel::price`. The inner
//! process is either a standard Brownian motion or an
//! Ornstein-Uhlenbeck process with zero mean and unit volatility. The
//! normalization costs no generality: an OU imbalance with mean m and
//! volatility s is absorbed by replacing d with d·e^{bm} and b with
//! b·s, which leaves the price process unchanged.
//!
//! For these models the stopping set of the purchase problem is not
//! always a half-line. The shape is decided by the sign of
//!
//! ```text
//!     η(z) = (L − r)(−f + p_c)(z)
//!          = d·e^{bz}·{b(θz − b/2) + r} + r(D − p_c)
//! ```
//!
//! (θ = 0 for the Brownian inner process), because the ψ-scaled
//! utilisation terms of both the single payoff h and the lifetime
//! payoff 𝔥 are r-harmonic and drop out of (L − r). Any stopping set
//! must sit inside {η ≤ 0}, so the classification below covers the
//! single and the lifetime problem alike:
//!
//! - Brownian inner: η(z) = d·e^{bz}(r − b²/2) + r(D − p_c) is
//!   monotone in e^{bz}; the sign pattern depends on how r compares
//!   with b²/2 and p_c with D, giving a half-line, an interval with
//!   left endpoint strictly inside the domain, or an empty set.
//! - OU inner: η is U-shaped with minimum at
//!   z⋄ = (1/b)·((b²/2 − r)/θ − 1) and η(z⋄) = −d·e^{bz⋄}·θ +
//!   r(D − p_c); the branches compare p_c with D and z⋄ with the
//!   exercise level z*, computing the relevant root u of η by
//!   bisection where one exists.
//!
//! "Excluded" means the sign analysis shows stopping is never optimal
//! for those parameters; asking a solver to run anyway is refused as
//! a sustainability failure. For the non-excluded shapes the right
//! endpoint ẑ is the optimal purchase threshold (the rightmost
//! maximizer of h/φ_r), and for intervals the left endpoint ẑ₀ is the
//! tangency point of the value function's linear section through the
//! left boundary, equivalently the maximizer of h/ψ_r. Every stack
//! model has L_c = 0, so the single problem is always in case A when
//! it is sustainable at all.

use crate::diffusion::{make_eigenpair, DiffusionModel, Imbalance};
use crate::error::{Error, Result};
use crate::lifetime::{lifetime_construct, LifetimeSolution};
use crate::num::bisect_root;
use crate::payoff::{hstar, ContractParams};
use crate::single::{maximize_left_of, search_upper, solve_single, SingleSolution};
use serde::Serialize;
use std::fmt;

/// Geometric type of the stopping set in the imbalance coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeTag {
    /// Stopping is never optimal; the set is empty.
    Excluded,
    /// The set is (a, ẑ]: buy whenever the imbalance is low enough.
    HalfLine,
    /// The set is [ẑ₀, ẑ], bounded away from the left boundary.
    Interval,
}

impl fmt::Display for ShapeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapeTag::Excluded => "excluded",
            ShapeTag::HalfLine => "half-line",
            ShapeTag::Interval => "interval",
        })
    }
}

/// Outcome of the stopping-set sign analysis together with the
/// computed endpoints.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StoppingSetShape {
    /// Shape of the stopping set.
    pub tag: ShapeTag,
    /// Right endpoint ẑ, the optimal purchase threshold; absent only
    /// when the set is excluded.
    pub z_hat: Option<f64>,
    /// Left endpoint ẑ₀; present exactly for intervals.
    pub z_hat0: Option<f64>,
    /// Sign-change location of the analysis: B for a Brownian inner
    /// process (where defined), the η-minimum z⋄ for an OU inner.
    pub inflection: Option<f64>,
    /// Root u of η bracketing the stopping set, for OU inner processes
    /// where the branch computes one.
    pub eta_root: Option<f64>,
    /// Which branch of the sign analysis fired, as a short sentence.
    pub branch: &'static str,
}

/// Solution of a stack problem in imbalance coordinates, bundled with
/// the stopping-set shape that licensed the solve.
#[derive(Clone, Debug)]
pub enum StackSolution {
    /// Single-option solve: thresholds are read off `solution` and the
    /// interval left endpoint, when present, off `shape`.
    Single {
        /// Stopping-set classification for these parameters.
        shape: StoppingSetShape,
        /// The single-option solution; `x_check` is ẑ.
        solution: SingleSolution,
    },
    /// Lifetime solve with per-cycle degradation.
    Lifetime {
        /// Stopping-set classification; the sign analysis is shared by
        /// the single and lifetime payoffs.
        shape: StoppingSetShape,
        /// The lifetime solution; `x_check` is the lifetime threshold z̃.
        solution: LifetimeSolution,
    },
}

impl StackSolution {
    /// The stopping-set classification.
    pub fn shape(&self) -> &StoppingSetShape {
        match self {
            StackSolution::Single { shape, .. } => shape,
            StackSolution::Lifetime { shape, .. } => shape,
        }
    }

    /// The single-option solution, if this was a single solve.
    pub fn as_single(&self) -> Option<&SingleSolution> {
        match self {
            StackSolution::Single { solution, .. } => Some(solution),
            StackSolution::Lifetime { .. } => None,
        }
    }

    /// The lifetime solution, if this was a lifetime solve.
    pub fn as_lifetime(&self) -> Option<&LifetimeSolution> {
        match self {
            StackSolution::Lifetime { solution, .. } => Some(solution),
            StackSolution::Single { .. } => None,
        }
    }
}

/// Finds the root of η right of its minimum `z_min`, where
/// η(z_min) < 0 and η grows without bound.
fn eta_root_right(eta: impl Fn(f64) -> f64, z_min: f64) -> Result<f64> {
    let mut step = 1.0;
    for _ in 0..60 {
        let hi = z_min + step;
        if eta(hi) > 0.0 {
            return bisect_root(&eta, z_min, hi, 1e-10);
        }
        step *= 2.0;
    }
    Err(Error::Solver(
        "eta has no sign change right of its minimum within the search range".into(),
    ))
}

/// Finds the root of η left of `anchor`, where η(anchor) < 0 and
/// η tends to the positive constant r(D − p_c) on the far left.
fn eta_root_left(eta: impl Fn(f64) -> f64, anchor: f64) -> Result<f64> {
    let mut step = 1.0;
    for _ in 0..60 {
        let lo = anchor - step;
        if eta(lo) > 0.0 {
            return bisect_root(&eta, lo, anchor, 1e-10);
        }
        step *= 2.0;
    }
    Err(Error::Solver(
        "eta has no sign change left of the anchor within the search range".into(),
    ))
}

/// Classifies the stopping set of a stack model and computes its
/// endpoints.
///
/// The sign analysis of η runs first and costs nothing; an excluded
/// outcome returns immediately with the diagnostic branch and no
/// endpoints. Otherwise the single-option solver locates ẑ (which
/// enforces the sustainability preconditions), and for intervals the
/// left endpoint ẑ₀ is located as the maximizer of h/ψ_r, the
/// tangency point of the chord that the transformed value function
/// follows down to the left boundary.
pub fn classify_stack_stopping_set(
    model: &DiffusionModel,
    c: &ContractParams,
) -> Result<StoppingSetShape> {
    let params = match model {
        DiffusionModel::Stack(p) => *p,
        _ => {
            return Err(Error::InvalidModel(
                "stopping-set classification applies to stack models only".into(),
            ))
        }
    };
    let z_star = c.exercise_state(model)?;
    let r = c.rate;
    let (floor, d, b) = (params.floor, params.scale, params.slope);
    let half_b2 = 0.5 * b * b;

    let (tag, branch, inflection, eta_root) = match params.inner {
        Imbalance::Brownian => {
            // sign object: d e^{bz} (r - b^2/2) + r(D - p_c), monotone
            // in z; B is its unique zero when the signs allow one
            let arg = r * (c.p_c - floor) / (d * (r - half_b2));
            let b_point = if r != half_b2 && arg > 0.0 {
                Some(arg.ln() / b)
            } else {
                None
            };
            if r > half_b2 {
                if c.p_c <= floor {
                    (
                        ShapeTag::Excluded,
                        "r > b^2/2 with p_c <= D: eta is positive everywhere, stopping is \
                         never optimal",
                        None,
                        None,
                    )
                } else {
                    (
                        ShapeTag::HalfLine,
                        "r > b^2/2 with p_c > D: eta changes sign from negative to positive \
                         at B",
                        b_point,
                        None,
                    )
                }
            } else if r < half_b2 {
                if c.p_c >= floor {
                    (
                        ShapeTag::HalfLine,
                        "r < b^2/2 with p_c >= D: eta is negative everywhere",
                        None,
                        None,
                    )
                } else {
                    (
                        ShapeTag::Interval,
                        "r < b^2/2 with p_c < D: eta changes sign from positive to negative \
                         at B",
                        b_point,
                        None,
                    )
                }
            } else if c.p_c < floor {
                (
                    ShapeTag::Excluded,
                    "r = b^2/2 with p_c < D: eta is the positive constant r(D - p_c)",
                    None,
                    None,
                )
            } else {
                (
                    ShapeTag::HalfLine,
                    "r = b^2/2 with p_c >= D: eta is the nonpositive constant r(D - p_c)",
                    None,
                    None,
                )
            }
        }
        Imbalance::Ou { theta } => {
            let z_dia = ((half_b2 - r) / theta - 1.0) / b;
            let eta =
                |z: f64| d * (b * z).exp() * (b * (theta * z - 0.5 * b) + r) + r * (floor - c.p_c);
            if c.p_c >= floor {
                // eta(z_dia) = -d e^{b z_dia} theta + r(D - p_c) < 0, so
                // the root right of the minimum always exists
                let u = eta_root_right(&eta, z_dia)?;
                (
                    ShapeTag::HalfLine,
                    "p_c >= D: eta is negative exactly left of its unique root u",
                    Some(z_dia),
                    Some(u),
                )
            } else if z_dia >= z_star {
                // eta is decreasing on the whole domain left of z*
                if eta(z_star) >= 0.0 {
                    (
                        ShapeTag::Excluded,
                        "p_c < D with the eta minimum right of z* and eta(z*) >= 0: eta is \
                         positive on the domain, stopping is never optimal",
                        Some(z_dia),
                        None,
                    )
                } else {
                    let u = eta_root_left(&eta, z_star)?;
                    (
                        ShapeTag::Interval,
                        "p_c < D with the eta minimum right of z* and eta(z*) < 0: eta is \
                         negative exactly right of its root u",
                        Some(z_dia),
                        Some(u),
                    )
                }
            } else if eta(z_dia) >= 0.0 {
                (
                    ShapeTag::Excluded,
                    "p_c < D with eta nonnegative at its minimum: eta is positive away from \
                     z_dia, stopping is never optimal",
                    Some(z_dia),
                    None,
                )
            } else {
                let u = eta_root_left(&eta, z_dia)?;
                (
                    ShapeTag::Interval,
                    "p_c < D with eta negative at its minimum: eta is negative on the window \
                     between its roots",
                    Some(z_dia),
                    Some(u),
                )
            }
        }
    };

    if tag == ShapeTag::Excluded {
        return Ok(StoppingSetShape {
            tag,
            z_hat: None,
            z_hat0: None,
            inflection,
            eta_root,
            branch,
        });
    }

    let pair = make_eigenpair(model, r)?;
    let sol = solve_single(&pair, c)?;
    let z_hat = sol
        .x_check()
        .expect("stack models have L_c = 0, a successful solve is case A");

    let z_hat0 = if tag == ShapeTag::Interval {
        let (zs, u_max) = search_upper(&pair, c)?;
        let lpsi_hat = pair.lpsi(z_hat);
        let g0 = |z: f64| hstar(&pair, c, z, 0.0) * (lpsi_hat - pair.lpsi(z)).exp();
        let found = maximize_left_of(zs, u_max, g0);
        if !(found.z < z_hat) {
            return Err(Error::Solver(format!(
                "interval endpoints out of order: left {} is not below right {}",
                found.z, z_hat
            )));
        }
        Some(found.z)
    } else {
        None
    };

    Ok(StoppingSetShape { tag, z_hat: Some(z_hat), z_hat0, inflection, eta_root, branch })
}

/// Solves a stack model in imbalance coordinates, either the single
/// option or the lifetime problem, after classifying the stopping
/// set. Excluded parameter combinations are refused: the sign
/// analysis proves the seller can never profitably stop, which is a
/// sustainability failure in disguise.
pub fn solve_stack(
    model: &DiffusionModel,
    c: &ContractParams,
    lifetime: bool,
) -> Result<StackSolution> {
    let shape = classify_stack_stopping_set(model, c)?;
    if shape.tag == ShapeTag::Excluded {
        return Err(Error::Sustainability(format!(
            "the stopping set is empty for these parameters: {}",
            shape.branch
        )));
    }
    let pair = make_eigenpair(model, c.rate)?;
    if lifetime {
        let solution = lifetime_construct(&pair, c)?;
        Ok(StackSolution::Lifetime { shape, solution })
    } else {
        let solution = solve_single(&pair, c)?;
        Ok(StackSolution::Single { shape, solution })
    }
}
