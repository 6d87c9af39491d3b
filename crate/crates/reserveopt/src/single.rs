//! The single-option purchase problem
//!
//! The seller picks one stopping time to buy energy and collect the
//! discounted contract payoff, so the value is
//!
//! ```text
//!     V_c(x) = sup_τ E_x[e^{−rτ} h(X_τ)],
//! ```
//!
//! and the classical one-dimensional theory (Dayanik & Karatzas 2003)
//! reduces it to maximizing g = h/φ_r to the left of the exercise
//! level. The outcome splits into three exclusive cases driven by the
//! boundary limit L_c = limsup_{x→a} −x/φ_r(x):
//!
//! - **A**: the maximum of g dominates L_c. The optimal rule is the
//!   first passage down to the rightmost maximizer x̌ < x*, and
//!   V_c(x) = φ_r(x) · g(x̌) on [x̌, b).
//! - **B**: L_c is finite and at least the maximum of g. No stopping
//!   time attains the value V_c = L_c · φ_r, which is approached by
//!   procrastinating toward the boundary.
//! - **C**: L_c = ∞ and the value is infinite.
//!
//! Ties between A and B are resolved toward B within a relative 10⁻⁹
//! band: when max g sits at L_c to that precision the two candidate
//! value functions coincide on the relevant region, and B is the tag
//! consistent with the degenerate power-law models where g ≡ L_c.
//!
//! The maximizer hunt parameterizes the half-line left of x* as
//! z = x* − e^u, evaluates the φ(x*)-normalized ratio on a 512-point
//! grid in u, and golden-refines every grid-local maximum, keeping the
//! rightmost of the near-optimal candidates. The grid stage is what
//! makes multimodal stack-model ratios safe; the normalization keeps
//! every intermediate quantity representable, since only ψ and φ
//! *ratios* ever carry meaning.
//!
//! [`threshold_policy_value`] prices an arbitrary (suboptimal)
//! purchase threshold, which is what sensitivity sweeps plot.

use crate::diffusion::{
    classify_lc, DiffusionModel, EigenPair, Imbalance, LcClassification,
};
use crate::error::{Error, Result};
use crate::num::golden_max;
use crate::payoff::{check_sustainability, single_payoff, ContractParams};
use std::fmt;

/// Which of the three solution regimes of the purchase problem holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// Optimal threshold exists; finite value attained.
    A,
    /// Finite value, not attained by any stopping time.
    B,
    /// Infinite value.
    C,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::A => "A",
            CaseTag::B => "B",
            CaseTag::C => "C",
        })
    }
}

/// Solution of the single-option problem.
#[derive(Clone, Debug)]
pub struct SingleSolution {
    case: CaseTag,
    x_check: Option<f64>,
    ratio_max: Option<f64>,
    lc: LcClassification,
    pair: EigenPair,
    contract: ContractParams,
}

impl SingleSolution {
    /// Case tag A/B/C.
    pub fn case(&self) -> CaseTag {
        self.case
    }

    /// Optimal purchase threshold (state coordinate), case A only.
    pub fn x_check(&self) -> Option<f64> {
        self.x_check
    }

    /// Maximized ratio h(x̌)/φ_r(x̌), case A only.
    pub fn ratio_max(&self) -> Option<f64> {
        self.ratio_max
    }

    /// The boundary-limit classification that drove the case.
    pub fn lc(&self) -> LcClassification {
        self.lc
    }

    /// Eigenfunction pair the solution was computed against.
    pub fn pair(&self) -> &EigenPair {
        &self.pair
    }

    /// Contract the solution was computed for.
    pub fn contract(&self) -> &ContractParams {
        &self.contract
    }

    /// Value function V_c at a state-coordinate point.
    ///
    /// Defined on [x̌, b) in case A (the theory gives no formula below
    /// the threshold), everywhere in the interior as L_c·φ_r in case B,
    /// and +∞ in case C.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        let model = self.pair.model();
        if !model.contains(x) {
            let (lo, hi) = model.bounds();
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        match self.case {
            CaseTag::C => Ok(f64::INFINITY),
            CaseTag::B => {
                let l = match self.lc {
                    LcClassification::Finite { value, .. } => value,
                    _ => unreachable!("case B implies finite L_c"),
                };
                Ok((self.pair.lphi(x) + l.ln()).exp())
            }
            CaseTag::A => {
                let xc = self.x_check.expect("case A carries a threshold");
                if x < xc {
                    return Err(Error::OutOfDomain { x, lo: xc, hi: model.bounds().1 });
                }
                let ratio = self.ratio_max.expect("case A carries the maximized ratio");
                Ok((self.pair.lphi(x) + ratio.ln()).exp())
            }
        }
    }
}

/// Search geometry for maximizations over (a, x*): the exercise level
/// in state coordinates and the depth u_max of the z = x* − e^u
/// parameterization, chosen far enough that the objective has decayed
/// for each model family.
pub(crate) fn search_upper(pair: &EigenPair, c: &ContractParams) -> Result<(f64, f64)> {
    let model = pair.model();
    let z_star = c.exercise_state(model)?;
    let u_max = match *model {
        DiffusionModel::Ou { theta, mu, sigma } => {
            let sd = sigma / (2.0 * theta).sqrt();
            ((z_star - mu).max(0.0) + 60.0 * sd + 1.0).ln()
        }
        // power-law tails decay slowly; cover eight decades of price
        DiffusionModel::NegGbm { .. } => (1e8 * z_star.abs().max(1.0)).ln(),
        DiffusionModel::Stack(p) => {
            // depth at which the exponential part of the price is dead
            // relative to the contract's own scale, padded, and at
            // least 45 characteristic lengths of the imbalance
            let money = 1.0 + p.floor.abs() + c.p_c + c.k_c + c.x_star.abs();
            let z_exp = ((1e-12 * money).ln() - p.scale.ln()) / p.slope - 5.0;
            let len = match p.inner {
                Imbalance::Brownian => 1.0 / (2.0 * pair.rate()).sqrt(),
                Imbalance::Ou { theta } => 1.0 / (2.0 * theta).sqrt(),
            };
            (z_star - z_exp.min(-45.0 * len)).max(2.0).ln()
        }
    };
    Ok((z_star, u_max))
}

/// A maximizer found left of the exercise level.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LeftMax {
    /// Rightmost near-optimal maximizer, state coordinate.
    pub z: f64,
    /// Objective value there.
    pub value: f64,
}

/// Number of points in the search grid over u.
pub(crate) const SEARCH_GRID: usize = 512;
/// Left end of the u-grid: z comes within e⁻²⁰ of the exercise level.
pub(crate) const U_MIN: f64 = -20.0;

/// The standard search grid in the u coordinate.
pub(crate) fn u_grid(u_max: f64) -> Vec<f64> {
    let span = u_max - U_MIN;
    (0..SEARCH_GRID)
        .map(|i| U_MIN + span * i as f64 / (SEARCH_GRID - 1) as f64)
        .collect()
}

/// Golden-refines the grid-local maxima of precomputed values `vals`
/// at the u-points `us`, evaluating `g` (a function of z = z* − e^u)
/// only inside the winning brackets. Among candidates within a
/// relative 10⁻⁹ of the best, the rightmost in z is reported, matching
/// the definition of x̌ as the largest element of the argmax set.
pub(crate) fn refine_on_grid(
    z_star: f64,
    us: &[f64],
    vals: &[f64],
    g: impl Fn(f64) -> f64,
) -> LeftMax {
    let n = us.len();
    let mut locals: Vec<usize> = (0..n)
        .filter(|&i| {
            (i == 0 || vals[i] >= vals[i - 1]) && (i == n - 1 || vals[i] >= vals[i + 1])
        })
        .collect();
    // plateaus make every point a local maximum; refining a capped,
    // value-sorted subset keeps the cost bounded, and the sort key
    // (value desc, u asc) lets the rightmost tie survive the cap
    locals.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(us[i].total_cmp(&us[j])));
    locals.truncate(16);

    let mut cands: Vec<(f64, f64)> = Vec::with_capacity(locals.len());
    for &i in &locals {
        let lo = us[i.saturating_sub(1)];
        let hi = us[(i + 1).min(n - 1)];
        let (u_ref, v_ref) = golden_max(|u| g(z_star - u.exp()), lo, hi, 1e-10);
        if v_ref >= vals[i] {
            cands.push((u_ref, v_ref));
        } else {
            cands.push((us[i], vals[i]));
        }
    }

    let gmax = cands.iter().fold(f64::NEG_INFINITY, |m, &(_, v)| m.max(v));
    let tol = 1e-9 * gmax.abs().max(1.0);
    let mut best_u = f64::INFINITY;
    let mut best_v = f64::NEG_INFINITY;
    for &(u, v) in &cands {
        if v >= gmax - tol && u < best_u {
            best_u = u;
            best_v = v;
        }
    }
    LeftMax { z: z_star - best_u.exp(), value: best_v }
}

/// Maximizes `g` over z ∈ (a, z*) via the u-grid plus golden
/// refinement of grid-local maxima.
pub(crate) fn maximize_left_of(z_star: f64, u_max: f64, g: impl Fn(f64) -> f64) -> LeftMax {
    let us = u_grid(u_max);
    let vals: Vec<f64> = us.iter().map(|&u| g(z_star - u.exp())).collect();
    refine_on_grid(z_star, &us, &vals, g)
}

/// Solves the single-option problem: classifies the case and, in case
/// A, locates the rightmost maximizer of h/φ_r left of the exercise
/// level.
///
/// Sustainability is a hard precondition: S1* failures always error,
/// and S2* failures error unless the contract was built with the
/// explicit override.
pub fn solve_single(pair: &EigenPair, c: &ContractParams) -> Result<SingleSolution> {
    let sustain = check_sustainability(pair, c)?;
    if !sustain.s1_star {
        return Err(Error::Sustainability(format!(
            "S1* fails: sup h = {} ≤ 0, the seller cannot profit",
            sustain.s1_sup
        )));
    }
    if !sustain.s2_star && !c.s2_overridden() {
        return Err(Error::Sustainability(format!(
            "S2* fails: p_c + K_c = {} ≥ x* = {}",
            c.total_premium(),
            c.x_star
        )));
    }

    let lc = classify_lc(pair);
    if lc == LcClassification::Infinite {
        return Ok(SingleSolution {
            case: CaseTag::C,
            x_check: None,
            ratio_max: None,
            lc,
            pair: pair.clone(),
            contract: *c,
        });
    }

    let (z_star, u_max) = search_upper(pair, c)?;
    let lpsi_star = pair.lpsi(z_star);
    let lphi_star = pair.lphi(z_star);
    let model = pair.model();
    // φ(x*)-normalized ratio: (h/φ)(z) · φ(z*), overflow-free
    let g = |z: f64| {
        let h = -model.price(z) + c.p_c + c.k_c * (pair.lpsi(z) - lpsi_star).exp();
        h * (lphi_star - pair.lphi(z)).exp()
    };
    let found = maximize_left_of(z_star, u_max, g);
    let ratio = found.value * (-lphi_star).exp();

    let case_a = match lc {
        LcClassification::Zero => true,
        LcClassification::Finite { value, .. } => ratio > value * (1.0 + 1e-9),
        LcClassification::Infinite => unreachable!(),
    };
    if case_a {
        if ratio <= 0.0 {
            return Err(Error::Solver(format!(
                "no positive maximum of h/phi found left of x* (best {ratio:.3e} at z = {}); \
                 search depth u_max = {u_max:.3}",
                found.z
            )));
        }
        Ok(SingleSolution {
            case: CaseTag::A,
            x_check: Some(found.z),
            ratio_max: Some(ratio),
            lc,
            pair: pair.clone(),
            contract: *c,
        })
    } else {
        Ok(SingleSolution {
            case: CaseTag::B,
            x_check: None,
            ratio_max: None,
            lc,
            pair: pair.clone(),
            contract: *c,
        })
    }
}

/// Value at `x` of the suboptimal policy that purchases at the first
/// passage down to `x_tilde`: φ_r(x)·h(x̃)/φ_r(x̃). Defined for
/// x ≥ x̃; at x̃ itself this is exactly the payoff h(x̃).
pub fn threshold_policy_value(
    pair: &EigenPair,
    c: &ContractParams,
    x_tilde: f64,
    x: f64,
) -> Result<f64> {
    let model = pair.model();
    for v in [x_tilde, x] {
        if !model.contains(v) {
            let (lo, hi) = model.bounds();
            return Err(Error::OutOfDomain { x: v, lo, hi });
        }
    }
    let z_star = c.exercise_state(model)?;
    if x_tilde >= z_star {
        return Err(Error::InvalidContract(format!(
            "threshold {x_tilde} must lie strictly below the exercise level"
        )));
    }
    if x < x_tilde {
        return Err(Error::OutOfDomain { x, lo: x_tilde, hi: model.bounds().1 });
    }
    let h = single_payoff(pair, c, x_tilde)?;
    Ok(h * (pair.lphi(x) - pair.lphi(x_tilde)).exp())
}
