"""Steady-state tests: boundary residuals, the E/F decomposition, the
apoptosis flux balance, radius solving and the strong-supply limits, all
cross-checked against the finite-difference oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st_h

from necrobifurc.bessel import besseli, besselk
from necrobifurc.csvio import render_csv
from necrobifurc.errors import DomainError, NoRootError
from necrobifurc.oracle import solve_pressure_bvp, solve_sigma_bvp
from necrobifurc.params import ModelParams
from necrobifurc.steady import (
    apoptosis_of_radius,
    build_steady_state,
    ef_eval,
    ef_grid,
    limit_apoptosis,
    limit_pressure,
    pressure_eval,
    pressure_grid,
    pressure_second,
    profile_rows,
    sigma_eval,
    sigma_grid,
    sigma_second_direct,
    solve_radius,
    steady_limits,
)
from necrobifurc.verify import random_params


def test_zero_supply_zero_core_nutrient_vanishes():
    p = ModelParams(beta=0.0, sigma_ul=0.0, R0=0.5, R=2.0)
    s = build_steady_state(p)
    assert s.a1 == 0.0 and s.a2 == 0.0
    rs = np.linspace(0.5, 2.0, 33)
    sig, sig_p, _ = sigma_grid(s, rs)
    assert np.all(sig == 0.0) and np.all(sig_p == 0.0)
    assert s.apopt == 0.0


def test_boundary_residuals_random_draws(rng):
    for _ in range(50):
        p = random_params(rng)
        s = build_steady_state(p)
        sig0, sigp0, _ = sigma_eval(s, p.R0)
        sigR, sigpR, _ = sigma_eval(s, p.R)
        assert abs(sig0 - p.sigma_ul) <= 1e-10 * max(1.0, p.sigma_ul)
        assert abs(sigpR - p.beta * (1.0 - sigR)) <= 1e-10 * max(
            1.0, abs(sigpR))
        pR, pdR = pressure_eval(s, p.R)
        p0, pd0 = pressure_eval(s, p.R0)
        scale = max(1.0, abs(pR), abs(pdR))
        assert abs(pR - p.g_inv / p.R) <= 1e-10 * scale
        assert abs(pd0 - p.chi * sigp0) <= 1e-10 * scale
        assert abs(pdR - p.chi * sigpR) <= 1e-10 * scale


def test_denominator_positive(rng):
    for _ in range(50):
        s = build_steady_state(random_params(rng))
        assert s.denom > 0.0


def test_sigma_against_fd_oracle(demo_params, demo_steady):
    prof = solve_sigma_bvp(demo_params, 2000)
    sig = sigma_grid(demo_steady, prof.r_values)[0]
    scale = np.max(np.abs(sig))
    assert np.max(np.abs(prof.values - sig)) <= 1e-6 * scale
    # Richardson-extrapolated pair sharpens the agreement
    fine = solve_sigma_bvp(demo_params, 4000)
    extrap = (4.0 * fine.values[::2] - prof.values) / 3.0
    assert np.max(np.abs(extrap - sig)) <= 1e-9 * scale


def test_sigma_range_theorem(rng):
    for _ in range(200):
        p = random_params(rng)
        s = build_steady_state(p)
        rs = np.linspace(p.R0, p.R, 2048)
        sig = sigma_grid(s, rs)[0]
        assert sig.min() >= -1e-12
        assert sig.max() <= 1.0 + 1e-12


def test_apoptosis_nonnegative(rng):
    for _ in range(100):
        p = random_params(rng)
        assert build_steady_state(p).apopt >= 0.0


@settings(max_examples=60, deadline=None)
@given(st_h.floats(min_value=0.01, max_value=50.0),
       st_h.floats(min_value=0.0, max_value=0.99),
       st_h.floats(min_value=0.05, max_value=3.0),
       st_h.floats(min_value=0.1, max_value=4.0))
def test_nutrient_range_and_apoptosis_property(beta, sigma_ul, r0, width):
    p = ModelParams(beta=beta, sigma_ul=sigma_ul, R0=r0, R=r0 + width)
    s = build_steady_state(p)
    assert s.apopt >= 0.0
    rs = np.linspace(p.R0, p.R, 197)
    sig = sigma_grid(s, rs)[0]
    assert sig.min() >= -1e-11
    assert sig.max() <= 1.0 + 1e-11


def test_flux_function_nondecreasing(rng):
    # r*sigma'(r) is the integrated source; it never decreases
    for _ in range(30):
        p = random_params(rng)
        s = build_steady_state(p)
        rs = np.linspace(p.R0, p.R, 1024)
        _, sig_p, _ = sigma_grid(s, rs)
        assert np.all(np.diff(rs * sig_p) >= -1e-12)


def test_sigma_second_two_routes(demo_steady):
    for r in np.linspace(0.5, 2.0, 17):
        _, _, via_ode = sigma_eval(demo_steady, float(r))
        direct = sigma_second_direct(demo_steady, float(r))
        assert abs(via_ode - direct) <= 1e-10 * max(1.0, abs(direct))


def test_ode_residual_of_closed_form_second_order(demo_params, demo_steady):
    # the FD stencil applied to the exact profile converges at order 2
    def residual(n):
        rs = np.linspace(demo_params.R0, demo_params.R, n + 1)
        h = rs[1] - rs[0]
        sig = sigma_grid(demo_steady, rs)[0]
        lap = (sig[2:] - 2.0 * sig[1:-1] + sig[:-2]) / h ** 2 \
            + (sig[2:] - sig[:-2]) / (2.0 * h * rs[1:-1])
        return np.max(np.abs(lap - sig[1:-1]))

    r1, r2 = residual(512), residual(1024)
    assert 3.4 <= r1 / r2 <= 4.6


def test_ef_anchors_and_identity(demo_steady, demo_params):
    e, f, _, _ = ef_eval(demo_steady, demo_params.R0)
    assert e == pytest.approx(1.0, abs=1e-14)
    assert f == pytest.approx(0.0, abs=1e-14)
    rs = np.linspace(demo_params.R0, demo_params.R, 101)
    e, f, _, _ = ef_grid(demo_steady, rs)
    sig = sigma_grid(demo_steady, rs)[0]
    assert np.max(np.abs(demo_params.sigma_ul * e + f - sig)) <= 1e-14


@pytest.mark.parametrize("beta", [0.1, 1.0, 10.0])
def test_ef_bounds_and_monotonicity(demo_params, beta):
    p = demo_params.with_(beta=beta)
    s = build_steady_state(p)
    rs = np.linspace(p.R0, p.R, 1001)
    e, f, ep, fp = ef_grid(s, rs)
    assert np.all(e >= -1e-12) and np.all(e <= 1.0 + 1e-12)
    assert np.all(f >= -1e-12) and np.all(f <= 1.0 + 1e-12)
    assert np.all(ep <= 1e-12)
    assert np.all(fp >= -1e-12)


def test_pressure_against_fd_oracle(demo_params, demo_steady):
    res = solve_pressure_bvp(demo_params, demo_steady, 4096)
    pv = pressure_grid(demo_steady, res.profile.r_values)[0]
    assert np.max(np.abs(res.profile.values - pv)) \
        <= 1e-6 * np.max(np.abs(pv))


def test_pressure_second_consistent_with_pde(demo_steady, demo_params):
    # p'' + p'/r = prolif*apopt - (prolif - chi) * sigma
    p = demo_params
    for r in (0.6, 1.0, 1.7, 2.0):
        sig, _, _ = sigma_eval(demo_steady, r)
        _, pd = pressure_eval(demo_steady, r)
        pdd = pressure_second(demo_steady, r)
        want = p.prolif * demo_steady.apopt - (p.prolif - p.chi) * sig
        assert pdd + pd / r == pytest.approx(want, rel=1e-12)


def test_apoptosis_of_radius_matches_build(demo_params, demo_steady):
    a = apoptosis_of_radius(demo_params, demo_params.R)
    assert a == pytest.approx(demo_steady.apopt, rel=1e-14)
    with pytest.raises(DomainError):
        apoptosis_of_radius(demo_params, demo_params.R0)


def test_solve_radius_round_trip(demo_params):
    target = apoptosis_of_radius(demo_params, 2.0)
    r = solve_radius(demo_params, target, (1.0, 4.0))
    assert abs(r - 2.0) <= 1e-8
    assert abs(apoptosis_of_radius(demo_params, r) - target) <= 1e-10


def test_solve_radius_no_root(demo_params):
    with pytest.raises(NoRootError) as exc:
        solve_radius(demo_params, -1.0, (1.0, 4.0))
    assert exc.value.scanned_min is not None
    assert exc.value.scanned_min >= 0.0  # apoptosis is never negative


def test_solve_radius_scanned_target(demo_params):
    # brute-force scan localizes a mid-range target first, the root finder
    # then reproduces a scanned value
    grid = np.linspace(1.0, 4.0, 121)
    vals = np.array([apoptosis_of_radius(demo_params, R) for R in grid])
    target = 0.5 * (vals.min() + vals.max())
    idx = int(np.argmin(np.abs(vals - target)))
    r = solve_radius(demo_params, target, (1.0, 4.0))
    assert abs(apoptosis_of_radius(demo_params, r) - target) <= 1e-10
    assert abs(r - grid[idx]) <= 2.0 * (grid[1] - grid[0])


def test_limit_profile_anchors(demo_params):
    lim = steady_limits(demo_params, demo_params.R)
    assert lim.sigma == pytest.approx(1.0, rel=1e-15)
    lim0 = steady_limits(demo_params, demo_params.R0)
    assert lim0.e0 == pytest.approx(1.0, rel=1e-14)
    assert lim0.e_inf == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(DomainError):
        steady_limits(demo_params, demo_params.R * 1.5)
    with pytest.raises(DomainError):
        steady_limits(demo_params, 0.0)


def test_limit_sigma_numeric_convergence():
    """The strong-supply, vanishing-core profile converges to
    I0(r)/I0(R), at the logarithmic-in-R0 rate set by K0(R0)."""
    R = 2.0
    gaps = []
    for R0 in (1e-4, 1e-12, 1e-30, 1e-100):
        p = ModelParams(beta=1e6, sigma_ul=0.5, R0=R0, R=R, chi=1.0,
                        g_inv=1.0, prolif=1.0)
        s = build_steady_state(p)
        rs = np.linspace(1e-3, R, 257)
        sig = sigma_grid(s, rs, extend=True)[0]
        lim = np.array([steady_limits(p, float(r)).sigma for r in rs])
        gaps.append(np.max(np.abs(sig - lim) / np.abs(lim)))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] <= 1e-2
    # boundary values converge much faster than interior ones
    p = ModelParams(beta=1e6, sigma_ul=0.5, R0=1e-4, R=R, chi=1.0,
                    g_inv=1.0, prolif=1.0)
    s = build_steady_state(p)
    sigR = sigma_eval(s, R)[0]
    assert abs(sigR - 1.0) <= 1e-5


def test_limit_apoptosis_numeric_convergence():
    R = 2.0
    want = limit_apoptosis(R)
    assert want == pytest.approx(2.0 * besseli(1, R) / (R * besseli(0, R)),
                                 rel=1e-15)
    gaps = []
    for R0 in (1e-4, 1e-12, 1e-30, 1e-100):
        p = ModelParams(beta=1e6, sigma_ul=0.5, R0=R0, R=R, chi=1.0,
                        g_inv=1.0, prolif=1.0)
        gaps.append(abs(build_steady_state(p).apopt - want) / want)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[0] <= 5e-3
    assert gaps[-1] <= 2e-4


def test_limit_pressure_resolves_printed_ambiguity():
    """The strong-supply pressure limit carries I0(r)/I0(R) (value) and
    I1(r)/I0(R) (slope); the I1(R)-normalized variants fail to match the
    generic path and even break the boundary condition at r = R."""
    R = 2.0
    p = ModelParams(beta=1e6, sigma_ul=0.5, R0=1e-40, R=R, chi=3.0,
                    g_inv=1.0, prolif=1.0)
    s = build_steady_state(p)
    a_lim = limit_apoptosis(R)
    for r in (0.7, 1.3, 2.0):
        pv, pd = pressure_eval(s, r)
        res_p, res_pd = limit_pressure(p, r)
        printed_p = (p.g_inv / R
                     + (p.prolif - p.chi)
                     * (1.0 - besseli(0, r) / besseli(1, R))
                     - 0.25 * p.prolif * a_lim * (R * R - r * r))
        printed_pd = (0.5 * p.prolif * a_lim * r
                      - (p.prolif - p.chi) * besseli(0, r) / besseli(1, R))
        assert abs(pv - res_p) <= 5e-3 * max(1.0, abs(res_p))
        assert abs(pd - res_pd) <= 5e-3 * max(1.0, abs(res_pd))
        assert abs(pv - printed_p) > 0.1
        assert abs(pd - printed_pd) > 0.1
    # the resolved form also satisfies the surface-tension condition
    assert limit_pressure(p, R)[0] == pytest.approx(p.g_inv / R, rel=1e-12)


def test_domain_checks(demo_steady):
    with pytest.raises(DomainError):
        sigma_eval(demo_steady, 0.4)
    with pytest.raises(DomainError):
        sigma_eval(demo_steady, 2.5)
    with pytest.raises(DomainError):
        pressure_eval(demo_steady, 0.1)
    with pytest.raises(DomainError):
        ef_eval(demo_steady, 4.0)


def test_profile_csv_round_trip(demo_steady):
    cols, rows = profile_rows(demo_steady, 9, include_limit=True)
    assert cols[:7] == ["r", "sigma", "sigma_prime", "p", "p_prime", "E",
                        "F"]
    text = render_csv(cols, rows)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(cols)
    # 17 significant digits survive the string round trip exactly
    parsed = [float(tok) for tok in lines[1].split(",")]
    for got, want in zip(parsed, rows[0]):
        assert got == want


def test_wronskian_consistency_of_coefficients(demo_steady):
    # independent reconstruction of sigma(R0) from a1, a2
    p = demo_steady.params
    got = (demo_steady.a1 * besseli(0, p.R0)
           + demo_steady.a2 * besselk(0, p.R0))
    assert got == pytest.approx(p.sigma_ul, rel=1e-12)
