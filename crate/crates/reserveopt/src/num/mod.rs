//! Numerical building blocks: Gauss–Legendre rules, the log-scale
//! eigenfunction integral, scalar optimization and root finding, a
//! Lanczos log-gamma, and an upper concave hull.
//!
//! Everything here is deliberately scalar and allocation-light; the
//! solvers above call these routines millions of times.

pub mod gauss;
pub mod quad;

/// log(e^a + e^b) without overflow.
pub fn logsumexp2(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// log Σ e^{v_i} without overflow; −∞ for an empty slice.
pub fn logsumexp(vs: &[f64]) -> f64 {
    let m = vs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + vs.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Natural log of the gamma function for x > 0, by the Lanczos
/// approximation (g = 7, 9 terms), relative error below 1e-13 on the
/// range used here. Arguments in (0, 1/2) go through the reflection
/// formula. The gamma factor only ever normalizes the eigenfunction
/// integral, so it cancels in every ratio the solvers form; it is kept
/// for unit tests against tabulated values and for callers who want the
/// absolute normalization.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Γ(x) Γ(1−x) = π / sin(πx)
        let s = (std::f64::consts::PI * x).sin();
        return (std::f64::consts::PI / s).ln() - ln_gamma(1.0 - x);
    }
    let xm1 = x - 1.0;
    let mut a = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (xm1 + i as f64);
    }
    let t = xm1 + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (xm1 + 0.5) * t.ln() - t + a.ln()
}

/// Golden-section maximization of `f` on `[lo, hi]`; returns the best
/// abscissa and value. The bracket shrinks by the golden ratio each
/// step, so the iteration count is logarithmic in (hi−lo)/xtol; a hard
/// cap guards against degenerate tolerances.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105;
    if hi < lo {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x1 = lo + GOLD * (hi - lo);
    let mut x2 = hi - GOLD * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= xtol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - GOLD * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + GOLD * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisection for a root of `f` on a bracket with a sign change.
/// Returns the midpoint of the final bracket of width ≤ `xtol`.
pub fn bisect_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> crate::Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(crate::Error::Solver(format!(
            "bisection bracket [{lo}, {hi}] has no sign change (f = {flo:.3e}, {fhi:.3e})"
        )));
    }
    for _ in 0..200 {
        if hi - lo <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Indices of the upper convex hull (least concave majorant vertices) of
/// points with strictly increasing abscissae. Collinear middle points
/// are dropped; callers detecting hull contact should compare against
/// the interpolated hull value rather than vertex membership.
pub fn upper_hull(pts: &[(f64, f64)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(pts.len().min(64));
    for i in 0..pts.len() {
        while hull.len() >= 2 {
            let a = pts[hull[hull.len() - 2]];
            let b = pts[hull[hull.len() - 1]];
            let c = pts[i];
            // b lies on or below the chord a–c exactly when the turn
            // a → b → c is not a right turn
            let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Piecewise-linear interpolation along the hull vertices at abscissa
/// `x`, clamped to the hull's span.
pub fn hull_value(pts: &[(f64, f64)], hull: &[usize], x: f64) -> f64 {
    debug_assert!(!hull.is_empty());
    if x <= pts[hull[0]].0 {
        return pts[hull[0]].1;
    }
    if x >= pts[hull[hull.len() - 1]].0 {
        return pts[hull[hull.len() - 1]].1;
    }
    // binary search for the hull segment containing x
    let mut lo = 0;
    let mut hi = hull.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if pts[hull[mid]].0 <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (xa, ya) = pts[hull[lo]];
    let (xb, yb) = pts[hull[hi]];
    ya + (yb - ya) * (x - xa) / (xb - xa)
}
