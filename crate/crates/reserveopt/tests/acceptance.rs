// Acceptance gate for the valuation engine. Each test covers one
// numbered criterion and prints a single "criterion NN: PASS/FAIL"
// line (visible under `cargo test --test acceptance -- --nocapture`);
// a FAIL line is followed by a panic carrying the same diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reserveopt::*;
use std::time::Instant;

// ---- reporting ----

fn report(num: u32, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {num:02}: {verdict} - {detail}");
    assert!(ok, "criterion {num:02}: {detail}");
}

// ---- shared fixtures ----

// Mean-reverting model fitted from four years of daily imbalance
// prices, restated per year, with the matching 3%/yr discount rate.
// All lifetime criteria run against this parameter set.
const REF_THETA: f64 = 68.69;
const REF_MEAN: f64 = 30.99;
const REF_SIGMA: f64 = 483.33;
const REF_RATE: f64 = 0.03;
const REF_A: f64 = 0.9999;

fn reference_model() -> DiffusionModel {
    DiffusionModel::ou(REF_THETA, REF_MEAN, REF_SIGMA).unwrap()
}

fn reference_contract(x_star: f64, p_c: f64, k_c: f64) -> ContractParams {
    ContractParams::new(x_star, p_c, k_c, REF_RATE, REF_A).unwrap()
}

// Lifetime value of an explicit two-threshold chain policy, composed
// from hitting discounts alone: one cycle falls from x* to the
// purchase threshold, books -x + p_c, rises back, books K_c, and the
// next cycle repeats at weight a. Independent of the solver's own
// fixed-point construction, so it doubles as an oracle for y*.
fn chain_value(pair: &EigenPair, c: &ContractParams, x_threshold: f64) -> f64 {
    let d1 = hitting_discount(pair, c.x_star, x_threshold).unwrap();
    let d2 = hitting_discount(pair, x_threshold, c.x_star).unwrap();
    d1 * ((-x_threshold + c.p_c) + d2 * c.k_c) / (1.0 - c.a * d1 * d2)
}

// ---- criterion 1: OU contracts classify as case A under the mean bound ----

#[test]
fn criterion_01_random_ou_contracts_case_a_below_bound() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240917);
    let mut checked = 0usize;
    let mut worst = f64::NEG_INFINITY;
    let mut violations: Vec<String> = Vec::new();
    while checked < 200 {
        let theta = rng.random_range((0.05f64).ln()..(100f64).ln()).exp();
        let sigma = rng.random_range((1f64).ln()..(500f64).ln()).exp();
        let mu = rng.random_range(-50.0..150.0);
        let eps = rng.random_range((2e-4f64).ln()..(5f64).ln()).exp();
        let rate = eps * theta;
        let sd = sigma / (2.0 * theta).sqrt();
        let k3 = rng.random_range(0.3..3.0);
        let x_star = mu + k3 * sd;
        if x_star <= 0.0 {
            continue;
        }
        // premium legs scaled to the stationary spread keep the
        // contract's live region within a few standard deviations of
        // the mean; a payoff that only turns positive hundreds of
        // deviations out is unrepresentable against phi in doubles
        let k1 = rng.random_range(-0.5..4.0);
        let p_c = mu - k1 * sd;
        if p_c < 0.0 {
            continue;
        }
        let k2 = rng.random_range(0.1..2.5);
        if k2 >= k1 + k3 {
            continue;
        }
        let k_c = k2 * sd;
        let model = DiffusionModel::ou(theta, mu, sigma).unwrap();
        let c = ContractParams::new(x_star, p_c, k_c, rate, 0.5).unwrap();
        let pair = make_eigenpair(&model, rate).unwrap();
        let tag = format!(
            "draw {checked}: theta={theta:.4} mu={mu:.3} sigma={sigma:.3} \
             rate={rate:.5} x*={x_star:.3} p_c={p_c:.3} k_c={k_c:.3}"
        );
        let sol = solve_single(&pair, &c).unwrap_or_else(|e| panic!("{tag}: solver error {e}"));
        let b0 = (rate * p_c + theta * mu) / (rate + theta);
        match (sol.case(), sol.x_check()) {
            (CaseTag::A, Some(xc)) => {
                worst = worst.max(xc - b0);
                if xc >= b0 {
                    violations.push(format!("{tag}: x_check {xc:.6} >= B0 {b0:.6}"));
                }
            }
            (case, _) => violations.push(format!("{tag}: case {case:?}")),
        }
        checked += 1;
    }
    let secs = t0.elapsed().as_secs_f64();
    for v in &violations {
        println!("  {v}");
    }
    let ok = violations.is_empty() && secs < 60.0;
    report(
        1,
        ok,
        &format!(
            "200 random OU contracts all case A with x_check < B0; \
             max(x_check - B0) = {worst:.3e}; {secs:.1}s"
        ),
    );
}

// ---- criterion 2: negative-GBM trichotomy with exact tags ----

#[test]
fn criterion_02_neg_gbm_trichotomy_exact() {
    // the premium-free contract on the negative half-line needs the
    // waiver constructor: x* < 0 cannot satisfy the buyer-side check
    let fixture = |mu: f64, rate: f64| {
        let m = DiffusionModel::neg_gbm(mu, 0.3).unwrap();
        let c = ContractParams::new_unchecked(-1.0, 0.0, 0.0, rate, 0.5).unwrap();
        (make_eigenpair(&m, rate).unwrap(), c)
    };

    // drift equal to the rate: case B, L_c = 1 exactly, V(x) = -x
    for (mu, rate) in [(0.05, 0.05), (0.02, 0.02)] {
        let (pair, c) = fixture(mu, rate);
        let sol = solve_single(&pair, &c).unwrap();
        assert_eq!(sol.case(), CaseTag::B, "mu={mu} rate={rate}");
        assert_eq!(
            sol.lc(),
            LcClassification::Finite { value: 1.0, low_confidence: false },
            "mu={mu} rate={rate}: L_c must be exactly 1"
        );
        for x in [-0.2, -1.0, -7.5] {
            let v = sol.value_at(x).unwrap();
            assert!(
                (v + x).abs() <= 1e-12 * x.abs(),
                "mu={mu} rate={rate}: V({x}) = {v}, expected {}",
                -x
            );
        }
    }

    // drift above the rate: case C, unbounded value
    for (mu, rate) in [(0.08, 0.05), (0.05, 0.02)] {
        let (pair, c) = fixture(mu, rate);
        let sol = solve_single(&pair, &c).unwrap();
        assert_eq!(sol.case(), CaseTag::C, "mu={mu} rate={rate}");
        assert_eq!(sol.lc(), LcClassification::Infinite, "mu={mu} rate={rate}");
        assert_eq!(sol.value_at(-2.0).unwrap(), f64::INFINITY);
    }

    // drift below the rate: case A with a finite threshold
    for (mu, rate) in [(0.01, 0.05), (0.02, 0.05)] {
        let (pair, c) = fixture(mu, rate);
        let sol = solve_single(&pair, &c).unwrap();
        assert_eq!(sol.case(), CaseTag::A, "mu={mu} rate={rate}");
        let xc = sol.x_check().expect("case A carries a threshold");
        assert!(
            xc.is_finite() && xc < c.x_star,
            "mu={mu} rate={rate}: x_check {xc}"
        );
    }

    report(
        2,
        true,
        "negative GBM: drift = rate gives case B with L_c = 1 and V = -x, \
         drift > rate gives case C, drift < rate gives case A",
    );
}

// ---- criterion 3: day-scale sweep unimodality and the MC oracle ----

#[test]
fn criterion_03_threshold_sweep_unimodal_and_mc_agrees() {
    let t0 = Instant::now();
    // day-granularity variant of the fitted model, with its contract
    let m = DiffusionModel::ou(3.42, 47.66, 30.65).unwrap();
    let c = ContractParams::new(60.0, 10.0, 40.0, 0.03, REF_A).unwrap();
    let pair = make_eigenpair(&m, 0.03).unwrap();
    let sol = solve_single(&pair, &c).unwrap();
    assert_eq!(sol.case(), CaseTag::A);
    let x_check = sol.x_check().unwrap();
    assert!((x_check - 18.6201).abs() < 1e-2, "x_check moved: {x_check}");
    let v_opt = threshold_policy_value(&pair, &c, x_check, 60.0).unwrap();
    assert!((v_opt - 24.285307).abs() < 1e-3, "optimum value moved: {v_opt}");

    // sweep the purchase threshold across the mean; the policy value
    // must rise to a single peak at the solver's threshold and fall
    let grid: Vec<f64> = (0..39).map(|k| -40.0 + 2.5 * k as f64).collect();
    let vals: Vec<f64> = grid
        .iter()
        .map(|&x| threshold_policy_value(&pair, &c, x, 60.0).unwrap())
        .collect();
    let peak = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap();
    for k in 1..vals.len() {
        if k <= peak {
            assert!(vals[k] > vals[k - 1], "not rising at {}", grid[k]);
        } else {
            assert!(vals[k] < vals[k - 1], "not falling at {}", grid[k]);
        }
    }
    assert!(
        (grid[peak] - x_check).abs() <= 2.5,
        "sweep peak {} sits away from x_check {x_check}",
        grid[peak]
    );
    assert!(v_opt >= vals[peak] - 1e-9, "analytic optimum below the sweep");

    // Monte Carlo oracle at the analytic threshold
    let cfg = SimConfig::new(2.5e-3, 200.0, 200_000, 41).unwrap();
    let est = estimate_single_value(&m, &c, x_check, 60.0, &cfg).unwrap();
    let dev = est.mean - v_opt;
    let secs = t0.elapsed().as_secs_f64();
    let ok = dev.abs() <= 3.0 * est.stderr + est.truncation_bias_bound && secs < 120.0;
    report(
        3,
        ok,
        &format!(
            "sweep unimodal with peak at {:.1} (x_check {x_check:.4}); \
             MC {:.5} +- {:.5} vs analytic {v_opt:.5} (dev {:+.2} se, \
             truncation bound {:.1e}); {secs:.1}s",
            grid[peak],
            est.mean,
            est.stderr,
            dev / est.stderr,
            est.truncation_bias_bound
        ),
    );
}

// ---- criterion 4: lifetime construction, verification, iteration ----

#[test]
fn criterion_04_lifetime_construct_verify_iterate_consistent() {
    let t0 = Instant::now();
    let m = reference_model();
    let c = reference_contract(100.0, 25.0, 25.0);
    let pair = make_eigenpair(&m, c.rate).unwrap();

    let sol = lifetime_construct(&pair, &c).unwrap();
    assert_eq!(sol.regime(), Regime::Alpha);
    let y = sol.y_star();
    let xc = sol.x_check();
    let rho = sol.rho_bound();
    assert!((y - 13881.8649).abs() < 0.01, "y_star moved: {y}");
    assert!((xc + 27.261594).abs() < 1e-3, "x_check moved: {xc}");
    assert!((rho - 0.996758).abs() < 1e-4, "rho moved: {rho}");

    let rep = lifetime_verify(&pair, &c, y, xc).unwrap();
    let verify_ok =
        rep.pass && rep.max_ratio_defect < 1e-6 && rep.fixed_point_residual < 1e-6;

    // the contraction iteration must converge to the same fixed point
    // at the contraction rate or better; with tolerance 1e-4 and rate
    // rho the stop gap to the fixed point is at most tol * rho/(1-rho)
    let tr = value_iterate(&pair, &c, 8000, 1e-4).unwrap();
    let last = *tr.values.last().unwrap();
    let gap_cap = 1e-4 * rho / (1.0 - rho) + 1e-4;
    let iterate_ok = tr.converged
        && (last - y).abs() <= gap_cap.max(0.05)
        && tr.empirical_rate <= rho + 0.01
        && (tr.x_check.unwrap() - xc).abs() < 0.05;

    let secs = t0.elapsed().as_secs_f64();
    let ok = verify_ok && iterate_ok && secs < 300.0;
    report(
        4,
        ok,
        &format!(
            "y* = {y:.4}, x_check = {xc:.4}; verify defects {:.1e}/{:.1e}; \
             iteration converged in {} steps to {last:.4} \
             (gap {:+.1e}, rate {:.6} vs rho {rho:.6}); {secs:.1}s",
            rep.max_ratio_defect,
            rep.fixed_point_residual,
            tr.values.len(),
            last - y,
            tr.empirical_rate
        ),
    );
}

// ---- criterion 5: boundary magnitude across the contract grid ----

#[test]
fn criterion_05_boundary_negative_below_mean_and_band() {
    let m = reference_model();
    let pair = make_eigenpair(&m, REF_RATE).unwrap();
    let mut singles: Vec<f64> = Vec::new();
    let mut lifetimes: Vec<f64> = Vec::new();
    let mut sanity: Vec<String> = Vec::new();
    for x_star in [50.0, 75.0, 100.0] {
        for total in [20.0, 30.0, 40.0, 50.0] {
            // an even split stands in for the unstated premium pairing;
            // total = x* fails the buyer-side sustainability check and
            // is skipped (the x* = 50, total = 50 corner)
            if total >= x_star {
                continue;
            }
            let c = reference_contract(x_star, total / 2.0, total / 2.0);
            let s = solve_single(&pair, &c).unwrap();
            let xs = s.x_check().expect("single threshold");
            let l = lifetime_construct(&pair, &c).unwrap();
            let xl = l.x_check();
            println!(
                "  x*={x_star:>5.1} total={total:>4.1}: single x_check = {xs:>9.4}, \
                 lifetime x_check = {xl:>9.4}"
            );
            for (kind, v) in [("single", xs), ("lifetime", xl)] {
                if !(v < 0.0 && v < REF_MEAN) {
                    sanity.push(format!("{kind} x_check {v} at x*={x_star} total={total}"));
                }
            }
            singles.push(xs);
            lifetimes.push(xl);
        }
    }
    let span = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (s_lo, s_hi) = span(&singles);
    let (l_lo, l_hi) = span(&lifetimes);
    let in_band = |v: &f64| (-90.0..=-50.0).contains(v);
    let any_band = singles.iter().any(in_band) || lifetimes.iter().any(in_band);
    let ok = sanity.is_empty() && any_band;
    for s in &sanity {
        println!("  sign violation: {s}");
    }
    report(
        5,
        ok,
        &format!(
            "all thresholds negative and below the mean {REF_MEAN}; \
             single x_check in [{s_lo:.2}, {s_hi:.2}], lifetime x_check in \
             [{l_lo:.2}, {l_hi:.2}]; band [-90, -50] hit: {any_band}"
        ),
    );
}

// ---- criterion 6: premium-split insensitivity of the lifetime value ----

#[test]
fn criterion_06_premium_split_insensitivity() {
    let m = reference_model();
    let pair = make_eigenpair(&m, REF_RATE).unwrap();
    let total = 50.0;
    let mut ys: Vec<f64> = Vec::new();
    for p_c in [0.0, 10.0, 25.0, 40.0, 49.999] {
        let c = reference_contract(100.0, p_c, total - p_c);
        ys.push(lifetime_construct(&pair, &c).unwrap().y_star());
    }
    let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / (0.5 * (hi + lo));
    let ok = spread <= 1e-2;
    report(
        6,
        ok,
        &format!(
            "y* across splits of {total}: [{lo:.4}, {hi:.4}], \
             relative spread {spread:.2e} (cap 1e-2)"
        ),
    );
}

// ---- criterion 7: monotone decay and its steepening in x* ----

#[test]
fn criterion_07_value_decreasing_and_steepening_in_x_star() {
    let m = reference_model();
    let pair = make_eigenpair(&m, REF_RATE).unwrap();
    let xs: Vec<f64> = (0..17).map(|k| 60.0 + 5.0 * k as f64).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| {
            lifetime_construct(&pair, &reference_contract(x, 25.0, 25.0))
                .unwrap()
                .y_star()
        })
        .collect();
    for (x, y) in xs.iter().zip(&ys) {
        println!("  x*={x:>5.1}: y* = {y:.4}");
    }
    let decreasing = ys.windows(2).all(|w| w[1] < w[0]);

    let at = |x: f64| ys[((x - 60.0) / 5.0).round() as usize];
    let slope_low = (at(60.0) - at(110.0)) / 50.0;
    let slope_high = (at(110.0) - at(140.0)) / 30.0;
    let log_slope_low = (at(60.0).ln() - at(110.0).ln()) / 50.0;
    let log_slope_high = (at(110.0).ln() - at(140.0).ln()) / 30.0;

    let ok = decreasing && slope_high > slope_low;
    report(
        7,
        ok,
        &format!(
            "y* strictly decreasing: {decreasing}; mean |dy*/dx*| on \
             [110, 140] = {slope_high:.2} vs [60, 110] = {slope_low:.2} \
             (criterion needs the right segment steeper); relative slopes \
             |dln y*/dx*|: {log_slope_high:.6} vs {log_slope_low:.6}"
        ),
    );
}

// ---- criterion 8: lifetime Monte Carlo oracle and suboptimality ----

#[test]
fn criterion_08_lifetime_mc_matches_and_neighbors_fall_short() {
    let t0 = Instant::now();
    let m = reference_model();
    let c = reference_contract(100.0, 25.0, 25.0);
    let pair = make_eigenpair(&m, c.rate).unwrap();
    let sol = lifetime_construct(&pair, &c).unwrap();
    let (y, xc) = (sol.y_star(), sol.x_check());

    // the explicit chain composition must reproduce the fixed point,
    // and must rank both neighbor thresholds strictly below it
    let chain_gap = (chain_value(&pair, &c, xc) - y).abs();
    assert!(chain_gap < 1e-6, "chain identity broke: {chain_gap:.2e}");
    let chain_lo = chain_value(&pair, &c, xc - 10.0);
    let chain_hi = chain_value(&pair, &c, xc + 10.0);
    assert!(
        chain_lo < y && chain_hi < y,
        "analytic neighbors must fall short: {chain_lo:.4}, {chain_hi:.4} vs {y:.4}"
    );

    // the per-cycle discount error of the crossing scheme is amplified
    // by the chain factor 1/(1 - a rho) of roughly 300, so the optimal
    // run needs a step small enough to keep that product under one
    // standard error; measured bias scales as dt^2
    let mut cfg = SimConfig::new(0.03 / REF_THETA, 420.0, 10_000, 42).unwrap();
    cfg.tail_cut = 4.0;
    let est = estimate_lifetime_value(&m, &c, xc, 100.0, &cfg).unwrap();
    let dev = est.mean - y;
    let main_ok = dev.abs() <= 3.0 * est.stderr;

    // suboptimal neighbors may run coarser: their shortfall of about
    // 260 dwarfs both the noise and the step bias
    let mut sub_lines = String::new();
    let mut sub_ok = true;
    for x_t in [xc - 10.0, xc + 10.0] {
        let mut cfg = SimConfig::new(0.15 / REF_THETA, 420.0, 6_000, 43).unwrap();
        cfg.tail_cut = 4.0;
        let e = estimate_lifetime_value(&m, &c, x_t, 100.0, &cfg).unwrap();
        sub_ok &= e.mean - y <= 3.0 * e.stderr;
        sub_lines.push_str(&format!(
            "; at {x_t:.2}: {:.2} ({:+.1} se)",
            e.mean,
            (e.mean - y) / e.stderr
        ));
    }

    let secs = t0.elapsed().as_secs_f64();
    let ok = main_ok && sub_ok && secs < 300.0;
    report(
        8,
        ok,
        &format!(
            "MC {:.2} +- {:.2} vs y* {y:.2} (dev {:+.2} se, truncation bound \
             {:.1}){sub_lines}; {secs:.0}s",
            est.mean,
            est.stderr,
            dev / est.stderr,
            est.truncation_bias_bound
        ),
    );
}

// ---- criterion 9: stack stopping-set trichotomy with a variational check ----

// Independent value oracle: the best single-threshold deviation from
// state z, over a dense grid of candidate thresholds augmented with
// the reported endpoints. For a one-dimensional diffusion the optimal
// stopping value is attained by threshold rules, so on the stopping
// set this must equal the payoff (no deviation beats stopping now)
// and outside it must strictly exceed the payoff.
fn best_deviation(
    pair: &EigenPair,
    c: &ContractParams,
    z: f64,
    candidates: &[f64],
) -> f64 {
    let h = |y: f64| single_payoff(pair, c, y).unwrap();
    let mut best = h(z);
    for &y in candidates {
        if (y - z).abs() > 1e-12 {
            let v = h(y) * hitting_discount(pair, z, y).unwrap();
            best = best.max(v);
        }
    }
    best
}

#[test]
fn criterion_09_stack_trichotomy_and_value_payoff_relations() {
    let fixtures: [(&str, DiffusionModel, ContractParams, ShapeTag); 6] = [
        (
            "brownian excluded",
            DiffusionModel::stack(40.0, 1.0, 1.0, Imbalance::Brownian).unwrap(),
            ContractParams::new(60.0, 30.0, 20.0, 1.0, 0.9).unwrap(),
            ShapeTag::Excluded,
        ),
        (
            "brownian half-line",
            DiffusionModel::stack(20.0, 1.0, 1.0, Imbalance::Brownian).unwrap(),
            ContractParams::new(60.0, 30.0, 20.0, 1.0, 0.9).unwrap(),
            ShapeTag::HalfLine,
        ),
        (
            "brownian interval",
            DiffusionModel::stack(25.0, 1.0, 2.0, Imbalance::Brownian).unwrap(),
            ContractParams::new(50.0, 20.0, 29.0, 0.5, 0.9).unwrap(),
            ShapeTag::Interval,
        ),
        (
            "ou half-line",
            DiffusionModel::stack(20.0, 1.0, 1.0, Imbalance::Ou { theta: 1.0 }).unwrap(),
            ContractParams::new(60.0, 30.0, 20.0, 0.05, 0.9).unwrap(),
            ShapeTag::HalfLine,
        ),
        (
            "ou excluded",
            DiffusionModel::stack(30.0, 0.1, 1.0, Imbalance::Ou { theta: 1.0 }).unwrap(),
            ContractParams::new(30.5, 20.0, 10.0, 0.4, 0.9).unwrap(),
            ShapeTag::Excluded,
        ),
        (
            "ou interval",
            DiffusionModel::stack(30.0, 1.0, 1.0, Imbalance::Ou { theta: 0.1 }).unwrap(),
            ContractParams::new(50.0, 20.0, 29.0, 0.02, 0.9).unwrap(),
            ShapeTag::Interval,
        ),
    ];

    let mut summary = String::new();
    for (name, m, c, expect) in fixtures {
        let shape = classify_stack_stopping_set(&m, &c).unwrap();
        assert_eq!(shape.tag, expect, "{name}");
        if expect == ShapeTag::Excluded {
            match solve_stack(&m, &c, false) {
                Err(Error::Sustainability(_)) => {}
                other => panic!("{name}: expected a sustainability error, got {other:?}"),
            }
            summary.push_str(&format!("{name}: excluded; "));
            continue;
        }

        let sol = solve_stack(&m, &c, false).unwrap();
        let single = sol.as_single().unwrap();
        let pair = make_eigenpair(&m, c.rate).unwrap();
        let h = |z: f64| single_payoff(&pair, &c, z).unwrap();
        let z_hat = shape.z_hat.unwrap();
        let z_star = c.exercise_state(&m).unwrap();
        assert!(z_hat < z_star, "{name}: ordering");
        let set_left = match shape.tag {
            ShapeTag::Interval => {
                let z0 = shape.z_hat0.unwrap();
                assert!(z0 < z_hat, "{name}: interval ordering");
                z0
            }
            _ => z_hat - 6.0,
        };

        // candidate deviation thresholds spanning the whole structure
        let mut cand: Vec<f64> = (0..=400)
            .map(|k| set_left - 4.0 + (z_star + 3.0 - (set_left - 4.0)) * k as f64 / 400.0)
            .collect();
        cand.push(z_hat);
        if let Some(z0) = shape.z_hat0 {
            cand.push(z0);
        }

        // on the stopping set: no deviation beats the payoff
        let mut max_eq = 0.0f64;
        for k in 0..=14 {
            let z = set_left + (z_hat - set_left) * k as f64 / 14.0;
            let hz = h(z);
            let gap = (best_deviation(&pair, &c, z, &cand) - hz) / hz.abs().max(1.0);
            max_eq = max_eq.max(gap);
        }
        let eq_ok = max_eq <= 1e-6;

        // contact of the solver's value at the threshold
        let contact = (single.value_at(z_hat).unwrap() - h(z_hat)).abs()
            / h(z_hat).abs().max(1.0);
        let contact_ok = contact <= 1e-6;

        // outside to the right: the value (fall back to the threshold)
        // must strictly dominate the payoff, and must match the
        // solver's value function
        let mut min_right = f64::INFINITY;
        let mut max_match = 0.0f64;
        let mut rights: Vec<f64> = (1..=6)
            .map(|k| z_hat + (z_star - z_hat) * 0.15 * k as f64)
            .collect();
        rights.extend([z_star + 0.5, z_star + 1.0]);
        for z in rights {
            let v = h(z_hat) * hitting_discount(&pair, z, z_hat).unwrap();
            let scale = h(z).abs().max(1.0);
            min_right = min_right.min((v - h(z)) / scale);
            max_match = max_match
                .max((single.value_at(z).unwrap() - v).abs() / v.abs().max(1.0));
        }
        let right_ok = min_right > 1e-9 && max_match <= 1e-6;

        // intervals: below the set the value rises into the left
        // endpoint, the maximizer of h against the increasing branch
        let mut min_left = f64::INFINITY;
        if let Some(z0) = shape.z_hat0 {
            for k in 1..=5 {
                let z = z0 - 0.4 * k as f64;
                let v = h(z0) * hitting_discount(&pair, z, z0).unwrap();
                min_left = min_left.min((v - h(z)) / h(z).abs().max(1.0));
            }
        }
        let left_ok = shape.z_hat0.is_none() || min_left > 1e-9;

        assert!(
            eq_ok && contact_ok && right_ok && left_ok,
            "{name}: eq {max_eq:.2e}, contact {contact:.2e}, right gap \
             {min_right:.2e}, match {max_match:.2e}, left gap {min_left:.2e}"
        );
        summary.push_str(&format!("{name}: contact {contact:.1e}; ", contact = contact));
    }

    report(
        9,
        true,
        &format!(
            "six fixtures hit excluded/half-line/interval for both inner \
             processes; value = payoff on each reported set and exceeds it \
             outside ({})",
            summary.trim_end_matches("; ")
        ),
    );
}

// ---- criterion 10: calibration recovery and exact winsorization ----

#[test]
fn criterion_10_calibration_recovery_and_truncation() {
    // synthetic daily series generated through the public simulator
    let m = reference_model();
    let mut cfg = SimConfig::new(1.0 / 365.0, 1461.0 / 365.0, 1, 2014).unwrap();
    cfg.antithetic = false;
    let batch = simulate_paths(&m, REF_MEAN, &cfg).unwrap();
    let vals: Vec<f64> = batch.path(0)[..1461].to_vec();
    let ts: Vec<i64> = (0..1461).map(|k| 1_338_508_800 + k as i64 * 86_400).collect();
    let series = PriceSeries::new(ts, vals, 86_400).unwrap();
    let fit = fit_ou_mle(&series, 1.0 / 365.0).unwrap();

    let theta_err = (fit.theta / REF_THETA - 1.0).abs();
    let sigma_err = (fit.sigma / REF_SIGMA - 1.0).abs();
    let mu_err = (fit.mu - REF_MEAN).abs();
    let fit_ok = theta_err <= 0.10 && sigma_err <= 0.10 && mu_err <= 3.0;

    // winsorization must clamp the observed extremes exactly
    let raw = vec![-6002.00, 0.27, 33.05, 31.14, 66.97, 6344.00];
    let ts2: Vec<i64> = (0..raw.len() as i64).map(|k| 1_338_508_800 + k * 86_400).collect();
    let series2 = PriceSeries::new(ts2, raw, 86_400).unwrap();
    let clamped = truncate(&series2, -150.0, 150.0).unwrap();
    let trunc_ok = clamped.values == vec![-150.0, 0.27, 33.05, 31.14, 66.97, 150.0];

    let ok = fit_ok && trunc_ok;
    report(
        10,
        ok,
        &format!(
            "recovered theta {:.2} ({:+.1}%), sigma {:.2} ({:+.1}%), \
             mu {:.3} ({:+.3}); extremes -6002/6344 clamp to -150/150 \
             exactly: {trunc_ok}",
            fit.theta,
            100.0 * (fit.theta / REF_THETA - 1.0),
            fit.sigma,
            100.0 * (fit.sigma / REF_SIGMA - 1.0),
            fit.mu,
            fit.mu - REF_MEAN
        ),
    );
}
