//! Monte Carlo policy valuation
//!
//! Everything analytic in this crate reduces to eigenfunction ratios;
//! this module is the deliberately independent cross-check. It prices
//! threshold policies by brute force: simulate the price process,
//! book the contract cashflows at the simulated first-passage times,
//! discount, and average. No ψ, no φ, no hull; agreement with the
//! analytic solvers is evidence, not construction.
//!
//! Discretization choices, and where their bias goes:
//!
//! - Ornstein-Uhlenbeck models (including OU imbalance stacks) use the
//!   exact Gaussian transition: mean μ + (x − μ)e^{−θΔt}, variance
//!   σ²(1 − e^{−2θΔt})/(2θ). The marginal law at the grid times is
//!   exact for any Δt; only passage detection between grid points is
//!   approximate.
//! - A Brownian imbalance is advanced exactly as well (it is its own
//!   Euler scheme). Negative geometric Brownian motion uses
//!   Euler-Maruyama and rejects the (astronomically unlikely) sign
//!   exit as a simulation error rather than silently reflecting.
//! - First passages between grid points are recovered with the
//!   Brownian-bridge crossing probability
//!   p = exp(−2(ℓ − x₀)(ℓ − x₁)/(σ²Δt)), applied with the local
//!   volatility. Without it, discrete monitoring books passages late
//!   and biases values low; with it, the residual bias shrinks with
//!   Δt and is checked against the statistical error in the tests.
//!
//! Antithetic pairing halves the variance of the smooth part of the
//! payoff: paths 2i and 2i+1 share one stream of draws, the twin
//! negating every Gaussian increment while reusing the same uniforms
//! for the crossing decisions. The uniforms are drawn unconditionally
//! every step, whether or not a bridge test needs them, so the two
//! paths of a pair and any replay of the same seed consume draws in
//! lockstep. Each pair owns one counter-mode RNG stream derived from
//! the master seed, and pair means are accumulated sequentially in
//! pair order, so the estimate is a pure function of (config, seed)
//! no matter how the work might be scheduled.
//!
//! Estimates report a `truncation_bias_bound` alongside the standard
//! error: every path that was cut short, by the horizon or by the
//! lifetime tail rule, contributes the discounted worst case of what
//! it could still have earned. The cashflows of a threshold policy
//! are fixed amounts at passage times, so these caps are honest
//! bounds, not heuristics.

use crate::diffusion::{DiffusionModel, Imbalance};
use crate::error::{Error, Result};
use crate::payoff::ContractParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Bridge-crossing exponents below this are treated as no crossing;
/// exp(−40) ≈ 4·10⁻¹⁸ is far below any resolvable probability.
const BRIDGE_EXP_FLOOR: f64 = -40.0;

/// Simulation schedule and reproducibility settings.
///
/// The horizon must cover at least 99% of the discounted mass,
/// e^{−r·horizon} < 0.01; the estimators enforce this against the
/// contract rate before running. `tail_cut` governs the lifetime
/// estimator's early stop: a path ends once the discounted bound on
/// everything it could still earn drops below this absolute amount.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SimConfig {
    /// Time step, in the model's time unit.
    pub dt: f64,
    /// Total simulated horizon, same unit as `dt`.
    pub horizon: f64,
    /// Number of paths (antithetic runs pair them two per stream).
    pub n_paths: usize,
    /// Master seed; pair i draws from stream i of a counter-mode RNG.
    pub seed: u64,
    /// Pair antithetic paths sharing draws (on by default).
    pub antithetic: bool,
    /// Absolute discounted-value floor at which a lifetime path stops
    /// cycling; the discarded remainder is added to the bias bound.
    pub tail_cut: f64,
}

impl SimConfig {
    /// Builds a config with antithetic pairing on and the lifetime
    /// tail cut at 10⁻⁶.
    pub fn new(dt: f64, horizon: f64, n_paths: usize, seed: u64) -> Result<Self> {
        let cfg = SimConfig { dt, horizon, n_paths, seed, antithetic: true, tail_cut: 1e-6 };
        cfg.check()?;
        Ok(cfg)
    }

    /// Default schedule for a model at a discount rate: Δt resolves
    /// the model's fastest timescale to 10⁻³, the horizon leaves
    /// e^{−r·horizon} = 0.005, and 2×10⁵ antithetic paths are used.
    pub fn default_for(model: &DiffusionModel, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::Simulation(format!(
                "horizon selection needs a positive rate, got {rate}"
            )));
        }
        let timescale = match *model {
            DiffusionModel::Ou { theta, .. } => theta,
            DiffusionModel::NegGbm { mu, sigma } => mu.abs().max(sigma * sigma).max(rate),
            DiffusionModel::Stack(p) => match p.inner {
                Imbalance::Ou { theta } => theta,
                Imbalance::Brownian => 1.0,
            },
        };
        SimConfig::new(1e-3 / timescale, (200.0f64).ln() / rate, 200_000, 0)
    }

    fn check(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Simulation(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.horizon.is_finite() && self.horizon > self.dt) {
            return Err(Error::Simulation(format!(
                "horizon must exceed one time step, got {} with dt = {}",
                self.horizon, self.dt
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::Simulation("at least one path is required".into()));
        }
        if !(self.tail_cut.is_finite() && self.tail_cut > 0.0) {
            return Err(Error::Simulation(format!(
                "tail cut must be positive, got {}",
                self.tail_cut
            )));
        }
        Ok(())
    }

    /// The discounted-mass coverage requirement on the horizon.
    fn require_horizon_coverage(&self, rate: f64) -> Result<()> {
        let leak = (-rate * self.horizon).exp();
        if leak >= 0.01 {
            return Err(Error::Simulation(format!(
                "horizon {} covers too little discounted mass at rate {rate}: \
                 e^(-r*T) = {leak:.3} must be below 0.01",
                self.horizon
            )));
        }
        Ok(())
    }

    fn n_units(&self) -> usize {
        if self.antithetic {
            self.n_paths.div_ceil(2)
        } else {
            self.n_paths
        }
    }
}

/// A batch of simulated price paths on a shared time grid.
#[derive(Clone, Debug)]
pub struct PathBatch {
    dt: f64,
    states: Vec<Vec<f64>>,
}

impl PathBatch {
    /// Grid spacing of the batch.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of paths.
    pub fn n_paths(&self) -> usize {
        self.states.len()
    }

    /// One path, price coordinates, starting value first.
    pub fn path(&self, i: usize) -> &[f64] {
        &self.states[i]
    }
}

// ---- stepping engine ----

/// Per-model transition kernel over one time step.
enum StepKind {
    /// Exact OU update x' = m + (x − m)·decay + noise_sd·N(0,1).
    ExactOu { mean: f64, decay: f64, noise_sd: f64, vol: f64 },
    /// Standard Brownian motion, exact by construction.
    Brownian { sqrt_dt: f64 },
    /// Euler step for negative geometric Brownian motion.
    EulerNegGbm { mu: f64, sigma: f64, dt: f64, sqrt_dt: f64 },
}

struct Stepper {
    kind: StepKind,
    dt: f64,
}

impl Stepper {
    fn new(model: &DiffusionModel, dt: f64) -> Stepper {
        let kind = match *model {
            DiffusionModel::Ou { theta, mu, sigma } => {
                let decay = (-theta * dt).exp();
                let noise_sd = sigma * ((1.0 - decay * decay) / (2.0 * theta)).sqrt();
                StepKind::ExactOu { mean: mu, decay, noise_sd, vol: sigma }
            }
            DiffusionModel::NegGbm { mu, sigma } => {
                StepKind::EulerNegGbm { mu, sigma, dt, sqrt_dt: dt.sqrt() }
            }
            DiffusionModel::Stack(p) => match p.inner {
                Imbalance::Brownian => StepKind::Brownian { sqrt_dt: dt.sqrt() },
                Imbalance::Ou { theta } => {
                    let decay = (-theta * dt).exp();
                    let noise_sd = ((1.0 - decay * decay) / (2.0 * theta)).sqrt();
                    StepKind::ExactOu { mean: 0.0, decay, noise_sd, vol: 1.0 }
                }
            },
        };
        Stepper { kind, dt }
    }

    /// Advances the state by one step given a standard normal draw.
    fn advance(&self, z: f64, n: f64) -> Result<f64> {
        match self.kind {
            StepKind::ExactOu { mean, decay, noise_sd, .. } => {
                Ok(mean + (z - mean) * decay + noise_sd * n)
            }
            StepKind::Brownian { sqrt_dt } => Ok(z + sqrt_dt * n),
            StepKind::EulerNegGbm { mu, sigma, dt, sqrt_dt } => {
                let next = z + mu * z * dt + sigma * (-z) * sqrt_dt * n;
                if next >= 0.0 {
                    return Err(Error::Simulation(format!(
                        "path left the negative half-line: {z} stepped to {next}; \
                         reduce the time step"
                    )));
                }
                Ok(next)
            }
        }
    }

    /// Diffusion coefficient at the current state, for the bridge
    /// crossing correction.
    fn local_vol(&self, z: f64) -> f64 {
        match self.kind {
            StepKind::ExactOu { vol, .. } => vol,
            StepKind::Brownian { .. } => 1.0,
            StepKind::EulerNegGbm { sigma, .. } => sigma * (-z),
        }
    }

    /// Brownian-bridge probability that the barrier `level` was touched
    /// between states z0 and z1 that both sit on the same side of it.
    fn bridge_crossing(&self, z0: f64, z1: f64, level: f64, u: f64) -> bool {
        let v = self.local_vol(z0);
        let e = -2.0 * (level - z0) * (level - z1) / (v * v * self.dt);
        e >= BRIDGE_EXP_FLOOR && u < e.exp()
    }
}

/// Simulates `cfg.n_paths` paths started at the price `x0`, on the
/// grid t = 0, Δt, 2Δt, …, horizon. Paths are returned in price
/// coordinates regardless of the model's internal state coordinate.
/// Antithetic pairing, when enabled, makes path 2i+1 the mirrored
/// twin of path 2i.
pub fn simulate_paths(model: &DiffusionModel, x0: f64, cfg: &SimConfig) -> Result<PathBatch> {
    cfg.check()?;
    let z0 = model.state_of_price(x0)?;
    let n_steps = (cfg.horizon / cfg.dt).ceil() as usize;
    let total = cfg.n_paths.checked_mul(n_steps + 1).unwrap_or(usize::MAX);
    if total > 30_000_000 {
        return Err(Error::Simulation(format!(
            "a materialized batch of {} paths x {} steps is too large; use the \
             policy estimators for runs of this size",
            cfg.n_paths, n_steps
        )));
    }
    let stepper = Stepper::new(model, cfg.dt);
    let mut states = Vec::with_capacity(cfg.n_paths);
    let units = cfg.n_units();
    for unit in 0..units {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(unit as u64);
        let twins: &[f64] = if cfg.antithetic { &[1.0, -1.0] } else { &[1.0] };
        let mut paths: Vec<Vec<f64>> = twins
            .iter()
            .map(|_| {
                let mut p = Vec::with_capacity(n_steps + 1);
                p.push(model.price(z0));
                p
            })
            .collect();
        let mut zs = vec![z0; twins.len()];
        for _ in 0..n_steps {
            let n: f64 = rng.sample(StandardNormal);
            for (j, &sign) in twins.iter().enumerate() {
                zs[j] = stepper.advance(zs[j], sign * n)?;
                paths[j].push(model.price(zs[j]));
            }
        }
        for p in paths {
            if states.len() < cfg.n_paths {
                states.push(p);
            }
        }
    }
    Ok(PathBatch { dt: cfg.dt, states })
}

/// A Monte Carlo policy value with its sampling error and an upper
/// bound on what path truncation may have removed.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PolicyEstimate {
    /// Estimated discounted policy value at the start state.
    pub mean: f64,
    /// Standard error of `mean` over the independent estimator units.
    pub stderr: f64,
    /// Number of independent units averaged (antithetic pairs when
    /// pairing is on, single paths otherwise).
    pub n_effective: usize,
    /// Sum of discounted worst-case remainders of truncated paths,
    /// averaged over units; the estimate can be low by at most this.
    pub truncation_bias_bound: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Phase {
    Buying,
    Covering,
    Done,
}

/// One path's cashflow state while a threshold policy runs.
struct PolicyPath {
    z: f64,
    disc: f64,
    phase: Phase,
    alpha: f64,
    cash: f64,
    trunc_bound: f64,
}

/// Everything constant across paths of one estimation run.
struct PolicySetup {
    z_buy: f64,
    z_star: f64,
    /// Cash booked at a mid-path purchase, −x̃ + p_c.
    buy_cash: f64,
    p_c: f64,
    k_c: f64,
    a: f64,
    lifetime: bool,
    disc_step: f64,
    disc_half: f64,
    tail_cut: f64,
    /// Worst-case value of one full cycle from its start.
    cycle_cap: f64,
    /// Geometric tail factor Σ Aᵏ = 1/(1−A) for future cycles.
    tail_factor: f64,
}

impl PolicyPath {
    fn start(setup: &PolicySetup, z0: f64, price0: f64) -> PolicyPath {
        let mut p = PolicyPath {
            z: z0,
            disc: 1.0,
            phase: Phase::Buying,
            alpha: 1.0,
            cash: 0.0,
            trunc_bound: 0.0,
        };
        // starting at or below the purchase threshold, the first
        // passage is immediate and books the actual starting price
        if z0 <= setup.z_buy {
            p.cash += p.alpha * (-price0 + setup.p_c);
            p.phase = Phase::Covering;
        }
        p
    }

    /// One grid step: the state advances to `z_next` and the active
    /// barrier is checked, with `u` deciding any bridge crossing.
    fn step(&mut self, setup: &PolicySetup, stepper: &Stepper, z_next: f64, u: f64) {
        if self.phase == Phase::Done {
            return;
        }
        let disc_next = self.disc * setup.disc_step;
        match self.phase {
            Phase::Buying => {
                let crossed_grid = z_next <= setup.z_buy;
                if crossed_grid {
                    self.cash += self.alpha * setup.buy_cash * disc_next;
                    self.phase = Phase::Covering;
                } else if stepper.bridge_crossing(self.z, z_next, setup.z_buy, u) {
                    self.cash += self.alpha * setup.buy_cash * self.disc * setup.disc_half;
                    self.phase = Phase::Covering;
                }
            }
            Phase::Covering => {
                let crossed_grid = z_next >= setup.z_star;
                if crossed_grid {
                    self.cash += self.alpha * setup.k_c * disc_next;
                    self.complete_cycle(setup);
                } else if stepper.bridge_crossing(self.z, z_next, setup.z_star, u) {
                    self.cash += self.alpha * setup.k_c * self.disc * setup.disc_half;
                    self.complete_cycle(setup);
                }
            }
            Phase::Done => unreachable!(),
        }
        self.z = z_next;
        self.disc = disc_next;
        if setup.lifetime && self.phase != Phase::Done {
            let residual = self.disc * self.remaining_cap(setup);
            if residual < setup.tail_cut {
                self.trunc_bound += residual;
                self.phase = Phase::Done;
            }
        }
    }

    fn complete_cycle(&mut self, setup: &PolicySetup) {
        if setup.lifetime {
            self.alpha *= setup.a;
            self.phase = Phase::Buying;
        } else {
            self.phase = Phase::Done;
        }
    }

    /// Worst case still bookable from the current phase, undiscounted.
    fn remaining_cap(&self, setup: &PolicySetup) -> f64 {
        let this_cycle = match self.phase {
            Phase::Buying => setup.cycle_cap,
            Phase::Covering => setup.k_c,
            Phase::Done => 0.0,
        };
        if setup.lifetime {
            self.alpha * (this_cycle + setup.a * setup.cycle_cap * setup.tail_factor)
        } else {
            self.alpha * this_cycle
        }
    }

    /// Books the truncation remainder of a path the horizon cut off.
    fn finish(&mut self, setup: &PolicySetup) {
        if self.phase != Phase::Done {
            self.trunc_bound += self.disc * self.remaining_cap(setup);
            self.phase = Phase::Done;
        }
    }
}

/// Shared driver for the single and lifetime estimators.
fn estimate_policy(
    model: &DiffusionModel,
    c: &ContractParams,
    x_threshold: f64,
    x0: f64,
    cfg: &SimConfig,
    lifetime: bool,
) -> Result<PolicyEstimate> {
    cfg.check()?;
    cfg.require_horizon_coverage(c.rate)?;
    if !(x_threshold < c.x_star) {
        return Err(Error::InvalidContract(format!(
            "purchase threshold {x_threshold} must lie below the exercise level {}",
            c.x_star
        )));
    }
    let z_buy = model.state_of_price(x_threshold)?;
    let z_star = c.exercise_state(model)?;
    let z0 = model.state_of_price(x0)?;
    let price0 = model.price(z0);
    let cycle_cap = (-x_threshold + c.p_c).max(0.0) + c.k_c;
    let setup = PolicySetup {
        z_buy,
        z_star,
        buy_cash: -x_threshold + c.p_c,
        p_c: c.p_c,
        k_c: c.k_c,
        a: c.a,
        lifetime,
        disc_step: (-c.rate * cfg.dt).exp(),
        disc_half: (-c.rate * 0.5 * cfg.dt).exp(),
        tail_cut: cfg.tail_cut,
        cycle_cap,
        tail_factor: 1.0 / (1.0 - c.a),
    };
    let stepper = Stepper::new(model, cfg.dt);
    let n_steps = (cfg.horizon / cfg.dt).ceil() as usize;
    let units = cfg.n_units();

    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut bound_sum = 0.0f64;
    for unit in 0..units {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(unit as u64);
        let mut a_path = PolicyPath::start(&setup, z0, price0);
        let mut b_path = cfg.antithetic.then(|| PolicyPath::start(&setup, z0, price0));
        for _ in 0..n_steps {
            let done_a = a_path.phase == Phase::Done;
            let done_b = b_path.as_ref().map(|b| b.phase == Phase::Done).unwrap_or(true);
            if done_a && done_b {
                break;
            }
            // draws are unconditional so twin paths and replays stay
            // aligned no matter who finishes first
            let n: f64 = rng.sample(StandardNormal);
            let u: f64 = rng.random();
            if !done_a {
                let z_next = stepper.advance(a_path.z, n)?;
                a_path.step(&setup, &stepper, z_next, u);
            }
            if let Some(b) = b_path.as_mut() {
                if b.phase != Phase::Done {
                    let z_next = stepper.advance(b.z, -n)?;
                    b.step(&setup, &stepper, z_next, u);
                }
            }
        }
        a_path.finish(&setup);
        let (value, bound) = match b_path.as_mut() {
            Some(b) => {
                b.finish(&setup);
                (0.5 * (a_path.cash + b.cash), 0.5 * (a_path.trunc_bound + b.trunc_bound))
            }
            None => (a_path.cash, a_path.trunc_bound),
        };
        sum += value;
        sum_sq += value * value;
        bound_sum += bound;
    }

    let n = units as f64;
    let mean = sum / n;
    let var = if units > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(PolicyEstimate {
        mean,
        stderr: (var / n).sqrt(),
        n_effective: units,
        truncation_bias_bound: bound_sum / n,
    })
}

/// Estimates the value of the single-option threshold policy: buy at
/// the first passage of the price to `x_tilde` (booking −X + p_c),
/// then collect K_c at the first passage to the exercise level.
pub fn estimate_single_value(
    model: &DiffusionModel,
    c: &ContractParams,
    x_tilde: f64,
    x0: f64,
    cfg: &SimConfig,
) -> Result<PolicyEstimate> {
    estimate_policy(model, c, x_tilde, x0, cfg, false)
}

/// Estimates the lifetime policy value: cycles of purchase at
/// `x_check` and exercise at x*, the k-th cycle scaled by Aᵏ, cycling
/// until the discounted remainder falls below the configured tail cut
/// or the horizon ends.
pub fn estimate_lifetime_value(
    model: &DiffusionModel,
    c: &ContractParams,
    x_check: f64,
    x0: f64,
    cfg: &SimConfig,
) -> Result<PolicyEstimate> {
    estimate_policy(model, c, x_check, x0, cfg, true)
}
