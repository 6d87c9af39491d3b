//! Valuation engine for physically covered call options on balancing
//! reserve delivered from an energy store.
//!
//! A battery operator sells the system operator an American-style option:
//! whenever the imbalance price first reaches the exercise level `x*`, the
//! operator must deliver stored energy and receives the utilisation payment
//! `K_c`. Before it can sell the option it has to buy the energy, paying the
//! prevailing price, and it collects the premium `p_c` at the moment of
//! sale. The operator's only control is *when* to buy, which turns the
//! whole contract into an optimal stopping problem on a one-dimensional
//! diffusion.
//!
//! The engine works throughout with the two fundamental r-harmonic
//! functions ψ_r (increasing) and φ_r (decreasing) of the price process,
//! in the classical Dayanik–Karatzas formulation: every hitting-time
//! Laplace transform, every value function and every threshold in this
//! crate is expressed through ratios of ψ_r and φ_r. Modules:
//!
//! - [`diffusion`] — price-process models (Ornstein–Uhlenbeck, negative
//!   geometric Brownian motion, shifted-exponential price stacks), the
//!   eigenfunction evaluators and the left-boundary limit `L_c`.
//! - [`payoff`] — contract terms, the single-option payoff `h`, the
//!   normalized lifetime payoff `ĥ` and the sustainability checks
//!   S1\*/S2\*.
//! - [`single`] — the single-option solver: case classification A/B/C,
//!   optimal purchase threshold `x̌`, threshold-policy sensitivity.
//! - [`lifetime`] — value of selling options back-to-back forever with
//!   per-cycle capacity degradation: direct construction, fixed-point
//!   verification, value iteration, regime classification.
//! - [`stack`] — stopping-set geometry for shifted-exponential stacks
//!   (half-line vs interval) and the stack solvers in imbalance
//!   coordinates.
//! - [`simulate`] — Monte Carlo policy valuation, used as an independent
//!   oracle for the analytic results.
//! - [`calibrate`] — time-series ingestion, daily averaging, winsorizing
//!   truncation and exact AR(1) maximum-likelihood fitting of the OU
//!   model.
//! - [`io`] — JSON model/contract specifications and CSV price series.
//!
//! # Units
//!
//! The numerical core is unit-agnostic: a model and a rate expressed in
//! mutually consistent time units produce correct prices, thresholds and
//! values in those units. The JSON interface defaults to per-day
//! parameters and converts to per-year internally; see [`io`] for the
//! conversion rules.

pub mod calibrate;
pub mod diffusion;
pub mod error;
pub mod io;
pub mod lifetime;
pub mod num;
pub mod payoff;
pub mod simulate;
pub mod single;
pub mod stack;

pub use calibrate::{daily_average, fit_ou_mle, ou_log_likelihood, truncate, OuFit, PriceSeries};
pub use diffusion::{
    classify_lc, hitting_discount, make_eigenpair, DiffusionModel, EigenPair, Imbalance,
    LcClassification, StackParams,
};
pub use error::{Error, Result};
pub use io::{
    parse_contract_spec, parse_model_spec, parse_problem_spec, read_price_csv,
    read_price_csv_from, ContractSpec, InnerSpec, ModelSpec, ProblemSpec, TimeUnit,
    DAYS_PER_YEAR,
};
pub use lifetime::{
    classify_regime, default_iteration_tol, lifetime_construct, lifetime_verify, value_iterate,
    IterationTrace, LifetimeSolution, Regime, VerifyReport,
};
pub use payoff::{
    check_sustainability, normalized_payoff, single_payoff, ContractParams, SustainabilityReport,
};
pub use simulate::{
    estimate_lifetime_value, estimate_single_value, simulate_paths, PathBatch, PolicyEstimate,
    SimConfig,
};
pub use single::{solve_single, threshold_policy_value, CaseTag, SingleSolution};
pub use stack::{classify_stack_stopping_set, solve_stack, ShapeTag, StackSolution, StoppingSetShape};
