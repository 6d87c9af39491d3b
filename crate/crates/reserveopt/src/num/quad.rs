//! Log-scale evaluation of the eigenfunction integral
//!
//! ```text
//!     I(z, ε) = ∫₀^∞ exp(z t − t²/2) t^(ε−1) dt,       ε > 0.
//! ```
//!
//! Up to a gamma-function normalization this is the parabolic cylinder
//! function: I(z, ε) = Γ(ε) e^{z²/4} D_{−ε}(−z). The OU eigenfunctions
//! are ψ_r(x) ∝ I(+z_x, ε) and φ_r(x) ∝ I(−z_x, ε) with
//! z_x = (x − μ)√(2θ)/σ and ε = r/θ, so a single well-conditioned
//! routine for log I covers both, for every rate and every point.
//!
//! Working in logs matters twice over: the integral itself spans
//! thousands of orders of magnitude across the arguments the solvers
//! visit (z ranges from deep negative tails to z² / 2-dominated growth),
//! and the rates of interest give ε as small as a few 1e-4, which puts
//! an integrable singularity t^(ε−1) at the origin that ordinary
//! quadrature misses.
//!
//! The evaluation always splits into two positive pieces combined by
//! log-sum-exp:
//!
//! - a *singular head* on [0, δ]: the analytic part exp(g(t)) is
//!   expanded in a Taylor series whose coefficients obey a two-term
//!   recurrence, and each term integrates exactly against t^(ε−1);
//! - a *smooth tail*: composite 20-point Gauss–Legendre panels of width
//!   ≤ 1 on the remaining finite range, with panels more than 60 nats
//!   below the running maximum pruned.
//!
//! Four routes keep the integrand representable:
//!
//! - z ≤ −1: substitute u = −z t, so I = (−z)^(−ε) ∫ u^(ε−1)
//!   e^{−u−u²/(2z²)} du with an O(1) exponent;
//! - −1 < z ≤ 5: integrate directly on [0, max(z,0)+40];
//! - 5 < z ≤ 40: factor e^{z²/2} and integrate e^{−(t−z)²/2} t^(ε−1),
//!   the head carrying the factor e^{−z²/2} in log space;
//! - z > 40: shift s = t − z on [−40, 40]; the singularity is out of
//!   reach and only the Gaussian bump matters.

use super::gauss::gl20;
use super::logsumexp2;

/// log of ∫₀^δ e^{g0log} (Σ_k a_k t^k) t^(ε−1) dt where the a_k are the
/// Taylor coefficients of exp(z t − t²/2), a_0 = 1. From
/// f'(t) = (z − t) f(t) the coefficients obey k a_k = z a_{k−1} − a_{k−2}.
/// The break requires two consecutive negligible terms because odd or
/// even coefficients can vanish identically (z = 0 kills all odd terms).
fn log_series_head(z: f64, eps: f64, delta: f64, g0log: f64) -> f64 {
    let mut a_km2 = 0.0_f64;
    let mut a_km1 = 1.0_f64;
    let mut s = delta.powf(eps) / eps;
    let mut dk = delta.powf(eps);
    let mut prev = f64::INFINITY;
    for k in 1..400 {
        let a_k = (z * a_km1 - a_km2) / k as f64;
        a_km2 = a_km1;
        a_km1 = a_k;
        dk *= delta;
        let term = a_k * dk / (k as f64 + eps);
        s += term;
        if term.abs() < 1e-18 * s.abs() && prev.abs() < 1e-18 * s.abs() && k > 4 {
            break;
        }
        prev = term;
    }
    debug_assert!(s > 0.0, "series head lost positivity (z={z}, eps={eps})");
    g0log + s.ln()
}

/// Head for the u-route: the analytic part is exp(−u − u²/(2z²)), so
/// f' = (−1 − u/z²) f and k a_k = −a_{k−1} − a_{k−2}/z².
fn log_series_head_u(z: f64, eps: f64, delta: f64) -> f64 {
    let iz2 = 1.0 / (z * z);
    let mut a_km2 = 0.0_f64;
    let mut a_km1 = 1.0_f64;
    let mut s = delta.powf(eps) / eps;
    let mut dk = delta.powf(eps);
    let mut prev = f64::INFINITY;
    for k in 1..400 {
        let a_k = (-a_km1 - a_km2 * iz2) / k as f64;
        a_km2 = a_km1;
        a_km1 = a_k;
        dk *= delta;
        let term = a_k * dk / (k as f64 + eps);
        s += term;
        if term.abs() < 1e-18 * s.abs() && prev.abs() < 1e-18 * s.abs() && k > 4 {
            break;
        }
        prev = term;
    }
    debug_assert!(s > 0.0, "u-route head lost positivity (z={z}, eps={eps})");
    s.ln()
}

/// log of ∫_lo^hi exp(logf(t)) dt by composite Gauss–Legendre panels of
/// width ≤ 1, each panel evaluated at its own log scale. Panels whose
/// pointwise maximum sits more than 60 nats below the best panel so far
/// contribute nothing at double precision and are skipped.
fn log_panels<F: Fn(f64) -> f64>(
    logf: F,
    lo: f64,
    hi: f64,
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    let n = ((hi - lo).ceil() as usize).max(1);
    let step = (hi - lo) / n as f64;
    let mut piece_logs: Vec<f64> = Vec::with_capacity(n.min(128));
    let mut best = f64::NEG_INFINITY;
    let mut lf = vec![0.0; nodes.len()];
    for i in 0..n {
        let a = lo + i as f64 * step;
        let mid = a + 0.5 * step;
        let half = 0.5 * step;
        let mut m = f64::NEG_INFINITY;
        for (j, &t) in nodes.iter().enumerate() {
            let v = logf(mid + half * t);
            lf[j] = v;
            if v > m {
                m = v;
            }
        }
        if !piece_logs.is_empty() && m < best - 60.0 {
            continue;
        }
        let val: f64 = lf
            .iter()
            .zip(weights)
            .map(|(&l, &w)| w * (l - m).exp())
            .sum::<f64>()
            * half;
        if val > 0.0 {
            let pl = m + val.ln();
            piece_logs.push(pl);
            if pl > best {
                best = pl;
            }
        }
    }
    if piece_logs.is_empty() {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = piece_logs.iter().map(|&p| (p - best).exp()).sum();
    best + sum.ln()
}

/// log I(z, ε) with the default 20-point panel rule.
pub fn log_parabolic_integral(z: f64, eps: f64) -> f64 {
    let (nodes, weights) = gl20();
    log_parabolic_integral_with(z, eps, nodes, weights)
}

/// log I(z, ε) with a caller-supplied panel rule; used by refinement
/// tests that double the node count.
pub fn log_parabolic_integral_with(z: f64, eps: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    debug_assert!(eps > 0.0, "the integral diverges for eps <= 0");
    if z <= -1.0 {
        let delta = 1.0;
        let head = log_series_head_u(z, eps, delta);
        let z2 = z * z;
        let tail = log_panels(
            |u| (eps - 1.0) * u.ln() - u - u * u / (2.0 * z2),
            delta,
            60.0,
            nodes,
            weights,
        );
        -eps * (-z).ln() + logsumexp2(head, tail)
    } else if z <= 5.0 {
        let delta = 1.0_f64.min(1.0 / (1.0 + z.abs()));
        let head = log_series_head(z, eps, delta, 0.0);
        let hi = z.max(0.0) + 40.0;
        let tail = log_panels(
            |t| (eps - 1.0) * t.ln() + z * t - t * t / 2.0,
            delta,
            hi,
            nodes,
            weights,
        );
        logsumexp2(head, tail)
    } else if z <= 40.0 {
        let delta = 1.0 / (1.0 + z);
        let head = log_series_head(z, eps, delta, -z * z / 2.0);
        let tail = log_panels(
            |t| (eps - 1.0) * t.ln() - (t - z) * (t - z) / 2.0,
            delta,
            z + 40.0,
            nodes,
            weights,
        );
        z * z / 2.0 + logsumexp2(head, tail)
    } else {
        let tail = log_panels(
            |s| (eps - 1.0) * (z + s).ln() - s * s / 2.0,
            -40.0,
            40.0,
            nodes,
            weights,
        );
        z * z / 2.0 + tail
    }
}
