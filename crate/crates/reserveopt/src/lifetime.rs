//! Lifetime valuation: selling options back-to-back forever
//!
//! After each completed cycle the store's capacity shrinks by the
//! factor A ∈ (0,1), so the lifetime value V̂ solves a fixed-point
//! problem: it is the value of one cycle whose exercise reward is
//! augmented by A times the value of starting over,
//!
//! ```text
//!     V̂(x*) = sup_{z < x*} E_z-cycle[ −X_τ + p_c + disc·(K_c + A·V̂(x*)) ].
//! ```
//!
//! Normalizing by φ_r collapses this to one dimension. Three
//! cooperating routes are implemented:
//!
//! - [`lifetime_construct`]: the direct construction. With
//!   ψ̃ = ψ_r/ψ_r(x*) and φ̃ = φ_r/φ_r(x*), the candidate value seen
//!   from a purchase threshold z is
//!
//!   ```text
//!       y(z) = (−z + p_c + ψ̃(z) K_c) / (φ̃(z) − A ψ̃(z)),
//!   ```
//!
//!   and V̂(x*) is the maximum of y over (a, x*), attained at the
//!   optimal threshold x̌. The denominator exceeds 1 − A for z < x*;
//!   points where evaluation noise drives it nonpositive are excluded
//!   from the search rather than trusted.
//! - [`lifetime_verify`]: independent certification of a candidate
//!   pair (y, x̂) through the fixed-point system: x̂ must maximize
//!   𝔥(·, y)/φ_r and y must equal φ_r(x*)/φ_r(x̂) · 𝔥(x̂, y), where
//!   𝔥(x, y) = ĥ(x, y·1{·≤x*}). At most one y can pass.
//! - [`value_iterate`]: the contraction iteration ζ̂_{n+1} = T̂ζ̂_n
//!   from zero. Each iterate is a constant times φ_r on [x*, b), so
//!   one scalar per step suffices; successive increments shrink
//!   geometrically at worst ρ = A ψ_r(x̌)/ψ_r(x*) < 1. With A near 1
//!   the iteration is slow by design and serves as a cross-check on
//!   the construction, not the default path.
//!
//! The operator application is affine in the iterate: on a fixed
//! search grid the normalized payoff is α(z) + β(z)·v, so the grid
//! coefficients are computed once and each step costs a vector sweep
//! plus a golden refinement of the winning brackets. The refinement
//! re-evaluates the true objective so the reported trace is faithful
//! to the operator, not to the grid.
//!
//! Regime α means the lifetime value strictly exceeds the single-option
//! value on [x*, b); regime β means the two coincide (continuing adds
//! nothing). [`classify_regime`] decides by comparing the first two
//! iterates at x*.

use crate::diffusion::EigenPair;
use crate::error::{Error, Result};
use crate::payoff::{hstar, ContractParams};
use crate::single::{
    maximize_left_of, refine_on_grid, search_upper, solve_single, u_grid, CaseTag, LeftMax,
};
use std::fmt;

/// Relative tolerance separating "the second iterate moved" (regime α)
/// from "it did not" (regime β).
const REGIME_TOL: f64 = 1e-9;

/// Whether back-to-back selling beats the single option.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// V̂ > V_c on [x*, b): the continuation carries real value.
    Alpha,
    /// V̂ = V_c: one option is all the value there is.
    Beta,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Alpha => "alpha",
            Regime::Beta => "beta",
        })
    }
}

/// Solution of the lifetime problem.
#[derive(Clone, Debug)]
pub struct LifetimeSolution {
    y_star: f64,
    x_check: f64,
    regime: Regime,
    rho_bound: f64,
    residual: f64,
    pair: EigenPair,
    contract: ContractParams,
}

impl LifetimeSolution {
    /// V̂(x*), the lifetime value at the exercise level.
    pub fn y_star(&self) -> f64 {
        self.y_star
    }

    /// Optimal purchase threshold x̌ (state coordinate).
    pub fn x_check(&self) -> f64 {
        self.x_check
    }

    /// Regime α/β of the solution.
    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Contraction-rate bound ρ = A·ψ_r(x̌)/ψ_r(x*) ∈ (0,1).
    pub fn rho_bound(&self) -> f64 {
        self.rho_bound
    }

    /// Relative change of y under one further operator application.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Eigenfunction pair the solution was computed against.
    pub fn pair(&self) -> &EigenPair {
        &self.pair
    }

    /// Contract the solution was computed for.
    pub fn contract(&self) -> &ContractParams {
        &self.contract
    }

    /// Lifetime value V̂ at a state-coordinate point x ≥ x̌, where
    /// V̂(x) = φ_r(x)/φ_r(x*) · y_star.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        let model = self.pair.model();
        if !model.contains(x) {
            let (lo, hi) = model.bounds();
            return Err(Error::OutOfDomain { x, lo, hi });
        }
        if x < self.x_check {
            return Err(Error::OutOfDomain { x, lo: self.x_check, hi: model.bounds().1 });
        }
        let z_star = self.contract.exercise_state(model)?;
        Ok((self.pair.lphi(x) - self.pair.lphi(z_star)).exp() * self.y_star)
    }
}

/// Fixed search grid with the operator's affine coefficients: for
/// v ≥ 0, the φ(x*)-normalized payoff at grid point i is
/// alpha[i] + beta[i]·v.
struct StepGrid {
    us: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    z_star: f64,
    lpsi_star: f64,
    lphi_star: f64,
}

impl StepGrid {
    fn new(pair: &EigenPair, c: &ContractParams) -> Result<Self> {
        let (z_star, u_max) = search_upper(pair, c)?;
        let lpsi_star = pair.lpsi(z_star);
        let lphi_star = pair.lphi(z_star);
        let us = u_grid(u_max);
        let model = pair.model();
        let mut alpha = Vec::with_capacity(us.len());
        let mut beta = Vec::with_capacity(us.len());
        for &u in &us {
            let z = z_star - u.exp();
            let psi_t = (pair.lpsi(z) - lpsi_star).exp();
            let weight = (lphi_star - pair.lphi(z)).exp();
            alpha.push((-model.price(z) + c.p_c + psi_t * c.k_c) * weight);
            beta.push(psi_t * c.a * weight);
        }
        Ok(StepGrid { us, alpha, beta, z_star, lpsi_star, lphi_star })
    }

    /// One operator application: T(v) = max_z 𝔥(z, v)·φ(x*)/φ(z),
    /// grid sweep on the cached coefficients plus exact golden
    /// refinement. Returns the new value and its maximizer.
    fn apply(&self, pair: &EigenPair, c: &ContractParams, v: f64) -> LeftMax {
        let vals: Vec<f64> = self
            .alpha
            .iter()
            .zip(&self.beta)
            .map(|(&a, &b)| a + b * v)
            .collect();
        let model = pair.model();
        let exact = |z: f64| {
            let psi_t = (pair.lpsi(z) - self.lpsi_star).exp();
            let weight = (self.lphi_star - pair.lphi(z)).exp();
            (-model.price(z) + c.p_c + psi_t * (c.k_c + c.a * v)) * weight
        };
        refine_on_grid(self.z_star, &self.us, &vals, exact)
    }
}

/// Requires the underlying single problem to sit in case A, the only
/// regime where the lifetime machinery applies.
fn require_case_a(pair: &EigenPair, c: &ContractParams) -> Result<()> {
    let sol = solve_single(pair, c)?;
    match sol.case() {
        CaseTag::A => Ok(()),
        CaseTag::B => Err(Error::Solver(
            "the single problem is in case B: the lifetime value coincides with \
             V_c = L_c·φ_r and there is nothing to construct"
                .into(),
        )),
        CaseTag::C => Err(Error::Solver(
            "the single problem is in case C: the lifetime value is infinite".into(),
        )),
    }
}

/// Direct construction of the lifetime solution by maximizing y(z)
/// over purchase thresholds z < x*.
pub fn lifetime_construct(pair: &EigenPair, c: &ContractParams) -> Result<LifetimeSolution> {
    require_case_a(pair, c)?;
    let (z_star, u_max) = search_upper(pair, c)?;
    let lpsi_star = pair.lpsi(z_star);
    let lphi_star = pair.lphi(z_star);
    let model = pair.model();
    let y = |z: f64| {
        let psi_t = (pair.lpsi(z) - lpsi_star).exp();
        let phi_t = (pair.lphi(z) - lphi_star).exp();
        let den = phi_t - c.a * psi_t;
        if den <= 0.0 {
            // theory puts the denominator above 1 − A; a nonpositive
            // value is evaluation noise and the point is excluded
            return f64::NEG_INFINITY;
        }
        (-model.price(z) + c.p_c + psi_t * c.k_c) / den
    };
    let found = maximize_left_of(z_star, u_max, y);

    let (y_star, x_check) = if found.value > 0.0 {
        (found.value, found.z)
    } else {
        // construction found no positive candidate; fall back to the
        // iteration and read the solution off its final step
        let trace = value_iterate(pair, c, 100_000, 1e-8 * c.x_star.abs().max(1.0))?;
        if !trace.converged {
            return Err(Error::Solver(format!(
                "lifetime construction found no positive maximum (best {:.3e}) and the \
                 fallback iteration did not converge in {} steps",
                found.value,
                trace.values.len()
            )));
        }
        let y_it = *trace.values.last().expect("converged trace is nonempty");
        let xc = trace
            .x_check
            .expect("converged trace carries its final maximizer");
        (y_it, xc)
    };

    let rho_bound = c.a * (pair.lpsi(x_check) - lpsi_star).exp();
    let grid = StepGrid::new(pair, c)?;
    let once_more = grid.apply(pair, c, y_star);
    let residual = (once_more.value - y_star).abs() / y_star.abs().max(1.0);
    let regime = classify_regime(pair, c)?;
    Ok(LifetimeSolution {
        y_star,
        x_check,
        regime,
        rho_bound,
        residual,
        pair: pair.clone(),
        contract: *c,
    })
}

/// Verification report for a candidate lifetime solution (y, x̂).
#[derive(Clone, Copy, Debug)]
pub struct VerifyReport {
    /// Check (i): relative amount by which the true maximum of
    /// 𝔥(·, y)/φ_r exceeds the value at x̂.
    pub max_ratio_defect: f64,
    /// Check (ii): relative residual of y = φ_r(x*)/φ_r(x̂)·𝔥(x̂, y).
    pub fixed_point_residual: f64,
    /// Tolerance both residuals are held to.
    pub tol: f64,
    /// Both checks passed.
    pub pass: bool,
}

/// Certifies a candidate (y, x̂) against the fixed-point system: x̂
/// must maximize 𝔥(·, y)/φ_r over (a, x*) and y must reproduce itself
/// through the scalar identity. Failed checks are reported, not
/// errors; at most one y can pass for a given contract.
pub fn lifetime_verify(
    pair: &EigenPair,
    c: &ContractParams,
    y: f64,
    x_hat: f64,
) -> Result<VerifyReport> {
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::InvalidContract(format!(
            "candidate lifetime value must be positive, got {y}"
        )));
    }
    let (z_star, u_max) = search_upper(pair, c)?;
    if !pair.model().contains(x_hat) || x_hat >= z_star {
        return Err(Error::OutOfDomain { x: x_hat, lo: pair.model().bounds().0, hi: z_star });
    }
    let lphi_star = pair.lphi(z_star);
    let ratio = |z: f64| hstar(pair, c, z, y) * (lphi_star - pair.lphi(z)).exp();
    let best = maximize_left_of(z_star, u_max, ratio);
    let at_hat = ratio(x_hat);
    let max_ratio_defect = (best.value - at_hat) / best.value.abs().max(1.0);
    let fixed_point_residual = (at_hat - y).abs() / y.abs().max(1.0);
    const TOL: f64 = 1e-6;
    Ok(VerifyReport {
        max_ratio_defect,
        fixed_point_residual,
        tol: TOL,
        pass: max_ratio_defect <= TOL && fixed_point_residual <= TOL,
    })
}

/// Trace of the value iteration ζ̂_{n+1} = T̂ ζ̂_n started from zero.
#[derive(Clone, Debug)]
pub struct IterationTrace {
    /// ζ̂_n(x*) for n = 1, 2, …; the first entry is the single-option
    /// value V_c(x*).
    pub values: Vec<f64>,
    /// Whether successive values came within the requested tolerance
    /// before the step budget ran out.
    pub converged: bool,
    /// Largest observed ratio of successive increments (0 when fewer
    /// than two meaningful increments were seen).
    pub empirical_rate: f64,
    /// Maximizer of the final operator application (state coordinate).
    pub x_check: Option<f64>,
}

/// Runs the contraction iteration until successive values at x*
/// differ by less than `tol` or `n_max` steps elapse. Exhausting the
/// budget is not an error: the partial trace is returned with
/// `converged = false`.
pub fn value_iterate(
    pair: &EigenPair,
    c: &ContractParams,
    n_max: usize,
    tol: f64,
) -> Result<IterationTrace> {
    if n_max == 0 || !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Solver(format!(
            "iteration needs a positive step budget and tolerance, got n_max = {n_max}, \
             tol = {tol}"
        )));
    }
    require_case_a(pair, c)?;
    let grid = StepGrid::new(pair, c)?;
    let mut values = Vec::new();
    let mut v = 0.0f64;
    let mut last_z = None;
    let mut converged = false;
    for _ in 0..n_max {
        let step = grid.apply(pair, c, v);
        last_z = Some(step.z);
        values.push(step.value);
        if (step.value - v).abs() < tol && values.len() > 1 {
            converged = true;
            v = step.value;
            break;
        }
        v = step.value;
    }
    // rate from increments big enough to be above refinement noise
    let floor = 1e-12 * v.abs().max(1.0);
    let mut rate = 0.0f64;
    for w in values.windows(3) {
        let d0 = w[1] - w[0];
        let d1 = w[2] - w[1];
        if d0 > floor && d1 > floor {
            rate = rate.max(d1 / d0);
        }
    }
    Ok(IterationTrace { values, converged, empirical_rate: rate, x_check: last_z })
}

/// Default tolerance for [`value_iterate`]: 10⁻⁸ at the contract's
/// price scale.
pub fn default_iteration_tol(c: &ContractParams) -> f64 {
    1e-8 * c.x_star.abs().max(1.0)
}

/// Decides regime α vs β by comparing the first two iterates at x*:
/// if applying the operator to the single-option value does not move
/// it, continuing adds nothing and the regime is β. Cases B and C of
/// the single problem are β outright (the lifetime and single values
/// coincide, or both are infinite).
pub fn classify_regime(pair: &EigenPair, c: &ContractParams) -> Result<Regime> {
    let sol = solve_single(pair, c)?;
    match sol.case() {
        CaseTag::B | CaseTag::C => Ok(Regime::Beta),
        CaseTag::A => {
            let grid = StepGrid::new(pair, c)?;
            let v1 = grid.apply(pair, c, 0.0).value;
            let v2 = grid.apply(pair, c, v1).value;
            if (v2 - v1).abs() <= REGIME_TOL * v1.abs().max(1.0) {
                Ok(Regime::Beta)
            } else {
                Ok(Regime::Alpha)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{make_eigenpair, DiffusionModel};
    use crate::payoff::single_payoff;
    use crate::single::threshold_policy_value;

    /// daily-unit mean-reverting model; fast to iterate because the
    /// contraction factor sits far from 1
    fn daily(a: f64) -> (EigenPair, ContractParams) {
        let m = DiffusionModel::ou(3.42, 47.66, 30.65).unwrap();
        let pair = make_eigenpair(&m, 0.03).unwrap();
        let c = ContractParams::new(60.0, 10.0, 40.0, 0.03, a).unwrap();
        (pair, c)
    }

    #[test]
    fn construction_verifies_and_iteration_agrees() {
        let (pair, c) = daily(0.9999);
        let sol = lifetime_construct(&pair, &c).unwrap();
        assert!(sol.y_star() > 0.0);
        assert!(sol.x_check() < 60.0);
        assert!(sol.rho_bound() > 0.0 && sol.rho_bound() < 1.0);
        assert!(sol.residual() < 1e-6, "one-step residual {:.2e}", sol.residual());
        assert_eq!(sol.regime(), Regime::Alpha);

        let report = lifetime_verify(&pair, &c, sol.y_star(), sol.x_check()).unwrap();
        assert!(report.pass, "verification failed: {report:?}");
        assert!(report.max_ratio_defect <= 1e-6);
        assert!(report.fixed_point_residual <= 1e-6);

        let trace = value_iterate(&pair, &c, 100_000, 1e-6).unwrap();
        assert!(trace.converged);
        let y_it = *trace.values.last().unwrap();
        // remaining gap after stopping is at most tol·ρ/(1−ρ)
        let slack = 1e-6 * sol.rho_bound() / (1.0 - sol.rho_bound()) + 1e-6;
        assert!(
            (y_it - sol.y_star()).abs() <= slack.max(1e-4),
            "iteration limit {y_it} vs construction {}",
            sol.y_star()
        );
        assert!(
            trace.empirical_rate <= sol.rho_bound() + 0.01,
            "empirical rate {} vs bound {}",
            trace.empirical_rate,
            sol.rho_bound()
        );
    }

    #[test]
    fn first_iterate_is_the_single_option_value() {
        let (pair, c) = daily(0.9999);
        let single = solve_single(&pair, &c).unwrap();
        let vc = single.value_at(60.0).unwrap();
        let trace = value_iterate(&pair, &c, 3, 1e-30).unwrap();
        assert!(
            (trace.values[0] - vc).abs() <= 1e-9 * vc,
            "first iterate {} vs V_c(x*) = {vc}",
            trace.values[0]
        );
        // monotone non-decreasing trace
        assert!(trace.values.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn perturbed_candidates_fail_verification() {
        let (pair, c) = daily(0.9999);
        let sol = lifetime_construct(&pair, &c).unwrap();
        let bad_y = lifetime_verify(&pair, &c, 1.01 * sol.y_star(), sol.x_check()).unwrap();
        assert!(!bad_y.pass);
        assert!(bad_y.fixed_point_residual > 1e-6);
        let shifted = sol.x_check() + 0.1 * (60.0 - sol.x_check());
        let bad_x = lifetime_verify(&pair, &c, sol.y_star(), shifted).unwrap();
        assert!(!bad_x.pass);
        assert!(bad_x.max_ratio_defect > 1e-6);
        // degenerate candidates are input errors, not report entries
        assert!(lifetime_verify(&pair, &c, -1.0, sol.x_check()).is_err());
        assert!(lifetime_verify(&pair, &c, sol.y_star(), 61.0).is_err());
    }

    #[test]
    fn vanishing_degradation_reduces_to_the_single_option() {
        let (pair, c) = daily(1e-12);
        let sol = lifetime_construct(&pair, &c).unwrap();
        let vc_at_star = {
            let single = solve_single(&pair, &c).unwrap();
            single.value_at(60.0).unwrap()
        };
        assert!(
            (sol.y_star() - vc_at_star).abs() <= 1e-6 * vc_at_star,
            "y_star {} vs V_c(x*) {vc_at_star}",
            sol.y_star()
        );
        // with A ≈ 0 the measured iterate difference collapses, and the
        // classifier must agree with whatever the measurement says
        let grid = StepGrid::new(&pair, &c).unwrap();
        let v1 = grid.apply(&pair, &c, 0.0).value;
        let v2 = grid.apply(&pair, &c, v1).value;
        let measured_alpha = (v2 - v1).abs() > REGIME_TOL * v1.abs().max(1.0);
        let tagged_alpha = classify_regime(&pair, &c).unwrap() == Regime::Alpha;
        assert_eq!(measured_alpha, tagged_alpha);
    }

    #[test]
    fn lifetime_threshold_sits_right_of_the_single_threshold() {
        let (pair, c) = daily(0.9999);
        let single = solve_single(&pair, &c).unwrap();
        let life = lifetime_construct(&pair, &c).unwrap();
        assert!(
            life.x_check() >= single.x_check().unwrap() - 1e-6,
            "lifetime threshold {} vs single {}",
            life.x_check(),
            single.x_check().unwrap()
        );
        // the lifetime value dominates the single value at and above x*
        for &x in &[60.0, 75.0, 100.0] {
            let v_hat = life.value_at(x).unwrap();
            let v_c = single.value_at(x).unwrap();
            assert!(v_hat > v_c, "V̂({x}) = {v_hat} must exceed V_c({x}) = {v_c}");
        }
        // and the payoff bound V̂ ≥ 𝔥(·, y) holds at the threshold
        let h = hstar(&pair, &c, life.x_check(), life.y_star());
        let v = life.value_at(life.x_check()).unwrap();
        assert!((v - h).abs() <= 1e-8 * h.abs().max(1.0));
    }

    #[test]
    fn premium_split_barely_moves_the_value() {
        // the split only enters through the hitting discount on K_c, so
        // when r/theta is tiny that discount is nearly 1 and the value
        // is a function of the total premium alone; the effect is real
        // at day-scale rates, so this invariance is asserted on the
        // per-year parameterization where r/theta ~ 4e-4
        let m = DiffusionModel::ou(68.69, 30.99, 483.33).unwrap();
        let pair = make_eigenpair(&m, 0.03).unwrap();
        let total = 50.0;
        let ys: Vec<f64> = [0.0, 10.0, 25.0, 40.0, 49.999]
            .iter()
            .map(|&p_c| {
                let c = ContractParams::new(100.0, p_c, total - p_c, 0.03, 0.9999).unwrap();
                lifetime_construct(&pair, &c).unwrap().y_star()
            })
            .collect();
        let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(
            (hi - lo) / hi <= 1e-2,
            "split spread {:.3e} too wide: {ys:?}",
            (hi - lo) / hi
        );
    }

    #[test]
    fn value_decreases_in_the_exercise_level() {
        let m = DiffusionModel::ou(3.42, 47.66, 30.65).unwrap();
        let pair = make_eigenpair(&m, 0.03).unwrap();
        let mut prev = f64::INFINITY;
        for &x_star in &[60.0, 80.0, 100.0, 120.0] {
            let c = ContractParams::new(x_star, 10.0, 40.0, 0.03, 0.9999).unwrap();
            let y = lifetime_construct(&pair, &c).unwrap().y_star();
            assert!(y < prev, "y_star not decreasing at x* = {x_star}");
            prev = y;
        }
    }

    #[test]
    fn construct_value_beats_any_single_cycle_policy() {
        // a lifetime of cycles is worth at least the best single cycle
        // priced at x*: y_star ≥ sup_z threshold value
        let (pair, c) = daily(0.9999);
        let sol = lifetime_construct(&pair, &c).unwrap();
        for i in 0..25 {
            let x_tilde = -30.0 + 3.0 * i as f64;
            let v = threshold_policy_value(&pair, &c, x_tilde, 60.0).unwrap();
            assert!(sol.y_star() >= v - 1e-9);
        }
        // and the payoff at the lifetime threshold is positive: buying
        // there is a genuine profit before continuation value
        assert!(single_payoff(&pair, &c, sol.x_check()).unwrap() > 0.0);
    }

    #[test]
    fn iteration_budget_exhaustion_is_flagged() {
        let (pair, c) = daily(0.9999);
        let trace = value_iterate(&pair, &c, 5, 1e-12).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.values.len(), 5);
        assert!(value_iterate(&pair, &c, 0, 1e-6).is_err());
        assert!(value_iterate(&pair, &c, 10, -1.0).is_err());
    }

    #[test]
    fn non_case_a_inputs_are_refused() {
        let m = DiffusionModel::neg_gbm(0.05, 0.3).unwrap();
        let pair = make_eigenpair(&m, 0.05).unwrap();
        let c = ContractParams::new_unchecked(-1.0, 0.0, 0.0, 0.05, 0.5).unwrap();
        assert!(lifetime_construct(&pair, &c).is_err());
        assert!(value_iterate(&pair, &c, 10, 1e-6).is_err());
        // but the regime classifier handles it: case B is regime β
        assert_eq!(classify_regime(&pair, &c).unwrap(), Regime::Beta);
    }
}
