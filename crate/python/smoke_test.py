#!/usr/bin/env python3
"""Smoke test of the reserveopt extension module.

Build and stage the module first:

    cargo build --release -p reserveopt-py
    cp target/release/libreserveopt_py.so python/reserveopt.so

then run `python3 python/smoke_test.py`. The checks mirror the
library's pinned reference fixture, so a pass means the bindings
reach the same solver the Rust tests exercise.
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import reserveopt as ro


def approx(a, b, tol=1e-9):
    assert abs(a - b) < tol, f"{a} != {b} (tol {tol})"


def main():
    # ---- model and contract construction, unit conversion ----
    model = ro.Model.ou(3.42, 47.66, 30.65)  # per-year by default
    lo, hi = model.bounds
    assert lo == -math.inf and hi == math.inf

    daily = ro.Model.ou(3.42 / 365.0, 47.66, 30.65 / math.sqrt(365.0), time_unit="day")
    assert "3.42" in repr(daily) or "3.419" in repr(daily)

    contract = ro.Contract(60.0, 10.0, 40.0, 0.03, 0.9999)
    approx(contract.total_premium, 50.0)
    try:
        ro.Contract(40.0, 30.0, 30.0, 0.03, 0.9)  # total premium above x*
        raise AssertionError("S2* violation must raise")
    except ValueError:
        pass
    print("ok: models and contracts construct, units convert, S2* enforced")

    # ---- sustainability ----
    report = ro.check_sustainability(model, contract)
    assert report.s1_star and report.s2_star and report.ok
    print("ok: sustainability report", repr(report))

    # ---- single-option solve against the pinned fixture ----
    sol = ro.solve_single(model, contract)
    assert sol.case == "A"
    approx(sol.x_check, 18.620143580677734)
    approx(sol.value_at(60.0), 24.285307294918084)
    print("ok: single solve", repr(sol))

    # ---- lifetime solve, certificate, iteration ----
    lt = ro.solve_lifetime(model, contract)
    assert lt.regime == "alpha" and lt.rho_bound < 1.0
    approx(lt.value_at(60.0), lt.y_star, 1e-9)

    cert = ro.lifetime_verify(model, contract, lt.y_star, lt.x_check)
    assert cert.ok, repr(cert)
    bad = ro.lifetime_verify(model, contract, lt.y_star * 1.01, lt.x_check)
    assert not bad.ok, "a nudged candidate must be rejected"

    trace = ro.value_iterate(model, contract, n_max=400)
    assert trace.converged
    assert trace.values[0] < trace.values[-1] <= lt.y_star * (1 + 1e-6)
    assert trace.empirical_rate <= lt.rho_bound + 0.01
    print(f"ok: lifetime y*={lt.y_star:.6f} certified, iteration {repr(trace)}")

    # ---- policy values and hitting discounts agree ----
    v = ro.threshold_policy_value(model, contract, lt.x_check, 60.0)
    d_up = ro.hitting_discount(model, contract.rate, lt.x_check, 60.0)
    d_dn = ro.hitting_discount(model, contract.rate, 60.0, lt.x_check)
    chain = d_dn * ((contract.p_c - lt.x_check) + d_up * contract.k_c) / (
        1.0 - contract.a * d_dn * d_up
    )
    approx(chain, lt.y_star, 1e-6 * lt.y_star)
    assert 0.0 < d_up < 1.0 and 0.0 < d_dn < 1.0
    print(f"ok: renewal chain from hitting discounts matches y* ({chain:.6f})")

    # ---- Monte Carlo estimate brackets the analytic value ----
    fast = ro.Contract(60.0, 10.0, 40.0, 0.25, 0.9)
    fsol = ro.solve_single(model, fast)
    est = ro.estimate_single(
        model, fast, fsol.x_check, 60.0, dt=0.003, horizon=20.0, paths=4000, seed=11
    )
    gap = abs(est.mean - fsol.value_at(60.0))
    assert gap <= 5.0 * est.stderr + est.truncation_bias_bound, repr(est)
    print(f"ok: simulation {est.mean:.4f} vs analytic {fsol.value_at(60.0):.4f}", repr(est))

    # ---- calibration round trip on a synthetic daily series ----
    theta, mu, sigma, dt = 30.0, 40.0, 300.0, 1.0 / 365.0
    decay = math.exp(-theta * dt)
    noise_sd = sigma * math.sqrt((1.0 - decay * decay) / (2.0 * theta))
    state = 0x9E3779B97F4A7C15

    def uniform():
        nonlocal state
        state ^= (state >> 12) & 0xFFFFFFFFFFFFFFFF
        state = (state ^ (state << 25)) & 0xFFFFFFFFFFFFFFFF
        state ^= state >> 27
        bits = (state * 0x2545F4914F6CDD1D) & 0xFFFFFFFFFFFFFFFF
        return (bits >> 11) / float(1 << 53)

    x, ts, prices = mu, [], []
    for k in range(900):
        ts.append(1_338_508_800 + k * 86_400)
        prices.append(x)
        u1, u2 = max(uniform(), 1e-12), uniform()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        x = mu + decay * (x - mu) + noise_sd * z

    fit = ro.fit_ou(ts, prices, truncate=(-150.0, 150.0))
    assert 10.0 < fit.theta < 90.0, repr(fit)
    assert 20.0 < fit.mu < 60.0, repr(fit)
    assert 200.0 < fit.sigma < 400.0, repr(fit)
    assert fit.truncation == (-150.0, 150.0)
    refit_model = fit.model()
    resolved = ro.solve_single(refit_model, ro.Contract(60.0, 10.0, 40.0, 0.25, 0.9))
    assert resolved.case == "A"
    print(f"ok: calibration {repr(fit)} feeds back into the solver")

    print("OK: all smoke checks passed")


if __name__ == "__main__":
    main()
