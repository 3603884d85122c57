"""Closed-form radially symmetric steady state on the annulus [R0, R].

The nutrient profile solves sigma'' + sigma'/r - sigma = 0 with a Dirichlet
condition at the necrotic boundary and a Robin (angiogenesis) condition at
the tumor boundary; it is a combination A1*I0(r) + A2*K0(r), equivalently
sigma_ul*E(r) + F(r) with the boundary-data decomposition E, F sharing one
denominator.  The pressure adds a particular part with ln r and r^2 terms;
the apoptosis rate is fixed by the flux balance
A = 2 (R sigma'(R) - R0 sigma'(R0)) / (R^2 - R0^2).

All evaluators are pure; a built :class:`SteadyState` is immutable and safe
to share across threads.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import brentq

from .bessel import (
    besseli,
    besseli_grid,
    besselk,
    besselk_grid,
)
from .errors import DomainError, NoRootError
from .params import ModelParams

# slack for r-domain checks, relative to the annulus width
_R_SLACK = 1e-9


@dataclass(frozen=True)
class _SigmaCoeffs:
    a1: float
    a2: float
    denom: float
    i0_r0: float  # I0(R0)
    k0_r0: float  # K0(R0)
    i0_R: float   # I0(R)
    i1_R: float   # I1(R)
    k0_R: float   # K0(R)
    k1_R: float   # K1(R)


def _sigma_coeffs(beta, sigma_ul, R0, R):
    """A1, A2 and the shared denominator of the nutrient profile.

    The denominator is grouped as I1(R)K0(R0) + K1(R)I0(R0)
    + beta*(I0(R)K0(R0) - K0(R)I0(R0)); the first two summands are
    positive outright and so is the third because I0 increases while K0
    decreases, which keeps the grouping cancellation-free.
    """
    i0_r0 = besseli(0, R0)
    k0_r0 = besselk(0, R0)
    i0_R = besseli(0, R)
    i1_R = besseli(1, R)
    k0_R = besselk(0, R)
    k1_R = besselk(1, R)
    denom = (i1_R * k0_r0 + k1_R * i0_r0
             + beta * (i0_R * k0_r0 - k0_R * i0_r0))
    if not denom > 0.0:
        raise AssertionError(
            "steady-state denominator not positive; cannot occur for "
            f"0 < R0 < R (denom={denom})")
    a1 = (sigma_ul * (k1_R - beta * k0_R) + beta * k0_r0) / denom
    a2 = (sigma_ul * (i1_R + beta * i0_R) - beta * i0_r0) / denom
    return _SigmaCoeffs(a1, a2, denom, i0_r0, k0_r0, i0_R, i1_R, k0_R, k1_R)


@dataclass(frozen=True)
class SteadyState:
    """Coefficients of the radially symmetric steady state.

    a1, a2 weight I0/K0 in the nutrient; c1, c2 are the pressure
    integration constants; apopt is the flux-balance apoptosis rate; denom
    is the shared denominator of a1/a2 (and of the E/F decomposition).
    """

    params: ModelParams
    a1: float
    a2: float
    c1: float
    c2: float
    apopt: float
    denom: float
    _coeffs: _SigmaCoeffs

    @property
    def R0(self):
        return self.params.R0

    @property
    def R(self):
        return self.params.R


def build_steady_state(p: ModelParams) -> SteadyState:
    """Construct the steady state for a dimensionless parameter bundle."""
    co = _sigma_coeffs(p.beta, p.sigma_ul, p.R0, p.R)
    sig_p_r0 = co.a1 * besseli(1, p.R0) - co.a2 * besselk(1, p.R0)
    sig_p_R = co.a1 * co.i1_R - co.a2 * co.k1_R
    sig_R = co.a1 * co.i0_R + co.a2 * co.k0_R
    apopt = 2.0 * (p.R * sig_p_R - p.R0 * sig_p_r0) / (p.R ** 2 - p.R0 ** 2)
    c2 = p.prolif * sig_p_r0 * p.R0 - 0.5 * p.prolif * apopt * p.R0 ** 2
    c1 = (p.g_inv / p.R + (p.prolif - p.chi) * sig_R
          - c2 * math.log(p.R) - 0.25 * p.prolif * apopt * p.R ** 2)
    return SteadyState(params=p, a1=co.a1, a2=co.a2, c1=c1, c2=c2,
                       apopt=apopt, denom=co.denom, _coeffs=co)


def _check_r(s: SteadyState, r):
    slack = _R_SLACK * (s.R - s.R0)
    if np.any(np.asarray(r) < s.R0 - slack) or np.any(np.asarray(r) > s.R + slack):
        raise DomainError(
            f"r must lie in [{s.R0}, {s.R}]")


def sigma_eval(s: SteadyState, r):
    """(sigma, sigma', sigma'') at radius r in [R0, R].

    sigma'' comes from the ODE identity sigma'' = sigma - sigma'/r, which
    is exact for the closed form; :func:`sigma_second_direct` offers the
    independent Bessel-derivative route.
    """
    _check_r(s, r)
    sig = s.a1 * besseli(0, r) + s.a2 * besselk(0, r)
    sig_p = s.a1 * besseli(1, r) - s.a2 * besselk(1, r)
    return sig, sig_p, sig - sig_p / r


def sigma_second_direct(s: SteadyState, r):
    """sigma'' from I1', K1' directly (cross-check path)."""
    _check_r(s, r)
    # I0'' = I1' = I0 - I1/r,  K0'' = -K1' = K0 + K1/r
    i_pp = besseli(0, r) - besseli(1, r) / r
    k_pp = besselk(0, r) + besselk(1, r) / r
    return s.a1 * i_pp + s.a2 * k_pp


def sigma_grid(s: SteadyState, rs, extend=False):
    """Vectorized (sigma, sigma', sigma'') over an array of radii.

    ``extend=True`` skips the annulus domain check: the closed form is a
    smooth function of r > 0 and the 2-D oracle evaluates it slightly
    outside [R0, R] on the perturbed domain.
    """
    rs = np.asarray(rs, dtype=np.float64)
    if not extend:
        _check_r(s, rs)
    i0 = besseli_grid(0, rs)
    i1 = besseli_grid(1, rs)
    k0 = besselk_grid(0, rs)
    k1 = besselk_grid(1, rs)
    sig = s.a1 * i0 + s.a2 * k0
    sig_p = s.a1 * i1 - s.a2 * k1
    return sig, sig_p, sig - sig_p / rs


def ef_eval(s: SteadyState, r):
    """(E, F, E', F') of the boundary-data decomposition at radius r.

    Reuses the steady state's denominator, so sigma_ul*E + F reproduces
    sigma to machine precision.
    """
    _check_r(s, r)
    co = s._coeffs
    beta = s.params.beta
    i0 = besseli(0, r)
    i1 = besseli(1, r)
    k0 = besselk(0, r)
    k1 = besselk(1, r)
    e = (co.i1_R * k0 + co.k1_R * i0
         + beta * (co.i0_R * k0 - co.k0_R * i0)) / co.denom
    f = beta * (co.k0_r0 * i0 - co.i0_r0 * k0) / co.denom
    e_p = (-co.i1_R * k1 + co.k1_R * i1
           - beta * (co.i0_R * k1 + co.k0_R * i1)) / co.denom
    f_p = beta * (co.k0_r0 * i1 + co.i0_r0 * k1) / co.denom
    return e, f, e_p, f_p


def ef_grid(s: SteadyState, rs):
    """Vectorized (E, F, E', F') over an array of radii."""
    rs = np.asarray(rs, dtype=np.float64)
    _check_r(s, rs)
    co = s._coeffs
    beta = s.params.beta
    i0 = besseli_grid(0, rs)
    i1 = besseli_grid(1, rs)
    k0 = besselk_grid(0, rs)
    k1 = besselk_grid(1, rs)
    e = (co.i1_R * k0 + co.k1_R * i0
         + beta * (co.i0_R * k0 - co.k0_R * i0)) / co.denom
    f = beta * (co.k0_r0 * i0 - co.i0_r0 * k0) / co.denom
    e_p = (-co.i1_R * k1 + co.k1_R * i1
           - beta * (co.i0_R * k1 + co.k0_R * i1)) / co.denom
    f_p = beta * (co.k0_r0 * i1 + co.i0_r0 * k1) / co.denom
    return e, f, e_p, f_p


def pressure_eval(s: SteadyState, r):
    """(p, p') at radius r in [R0, R]."""
    _check_r(s, r)
    p = s.params
    sig, sig_p, _ = sigma_eval(s, r)
    val = (-(p.prolif - p.chi) * sig + s.c1 + s.c2 * math.log(r)
           + 0.25 * p.prolif * s.apopt * r * r)
    der = (-(p.prolif - p.chi) * sig_p + s.c2 / r
           + 0.5 * p.prolif * s.apopt * r)
    return val, der


def pressure_second(s: SteadyState, r):
    """p''(r), from differentiating the closed form once more."""
    _check_r(s, r)
    p = s.params
    _, _, sig_pp = sigma_eval(s, r)
    return (-(p.prolif - p.chi) * sig_pp - s.c2 / (r * r)
            + 0.5 * p.prolif * s.apopt)


def pressure_grid(s: SteadyState, rs):
    """Vectorized (p, p') over an array of radii."""
    rs = np.asarray(rs, dtype=np.float64)
    p = s.params
    sig, sig_p, _ = sigma_grid(s, rs)
    val = (-(p.prolif - p.chi) * sig + s.c1 + s.c2 * np.log(rs)
           + 0.25 * p.prolif * s.apopt * rs * rs)
    der = (-(p.prolif - p.chi) * sig_p + s.c2 / rs
           + 0.5 * p.prolif * s.apopt * rs)
    return val, der


def apoptosis_of_radius(p: ModelParams, R):
    """Flux-balance apoptosis rate for outer radius R (same R0, beta,
    sigma_ul as ``p``); nonnegative for every valid geometry."""
    if not R > p.R0:
        raise DomainError(f"need R > R0={p.R0}, got R={R}")
    co = _sigma_coeffs(p.beta, p.sigma_ul, p.R0, R)
    sig_p_r0 = co.a1 * besseli(1, p.R0) - co.a2 * besselk(1, p.R0)
    sig_p_R = co.a1 * co.i1_R - co.a2 * co.k1_R
    return 2.0 * (R * sig_p_R - p.R0 * sig_p_r0) / (R ** 2 - p.R0 ** 2)


def solve_radius(p: ModelParams, apopt_target, bracket, scan_points=65):
    """Outer radius R with apoptosis_of_radius(p, R) = apopt_target.

    Scans the bracket for a sign change, then runs a bracketed
    bisection/secant hybrid there.  Raises :class:`NoRootError` (carrying
    the scanned apoptosis range) when the target is not attained.
    """
    lo, hi = bracket
    if not (lo > p.R0 and hi > p.R0):
        raise DomainError("bracket endpoints must exceed R0")
    if hi <= lo:
        raise DomainError("bracket must satisfy lo < hi")
    grid = np.linspace(lo, hi, scan_points)
    vals = np.array([apoptosis_of_radius(p, R) for R in grid])
    fs = vals - apopt_target
    if fs[0] == 0.0:
        return float(grid[0])
    for i in range(1, scan_points):
        if fs[i] == 0.0:
            return float(grid[i])
        if fs[i - 1] * fs[i] < 0.0:
            root = brentq(
                lambda R: apoptosis_of_radius(p, R) - apopt_target,
                grid[i - 1], grid[i], xtol=1e-14, rtol=8.9e-16)
            return float(root)
    raise NoRootError(
        f"apoptosis target {apopt_target} not bracketed; scanned range "
        f"[{vals.min()}, {vals.max()}] over R in [{lo}, {hi}]",
        scanned_min=float(vals.min()), scanned_max=float(vals.max()))


@dataclass(frozen=True)
class LimitProfiles:
    """Limit nutrient profiles at one radius.

    e0: the vanishing-supply limit (beta -> 0) shape.
    e_inf, f_inf: the strong-supply limit (beta -> inf) decomposition.
    sigma, sigma_prime: the joint strong-supply, vanishing-core limit
    I0(r)/I0(R), I1(r)/I0(R).
    """

    e0: float
    e_inf: float
    f_inf: float
    sigma: float
    sigma_prime: float


def steady_limits(p: ModelParams, r):
    """Closed-form limit profiles at radius r (0 < r <= R).

    These are dedicated code paths; they are never produced by pushing
    beta or R0 to extreme values through the generic formulas.
    """
    if not 0.0 < r <= p.R * (1.0 + 1e-12):
        raise DomainError(f"need 0 < r <= R={p.R}, got r={r}")
    i0 = besseli(0, r)
    i1 = besseli(1, r)
    k0 = besselk(0, r)
    i0_r0 = besseli(0, p.R0)
    k0_r0 = besselk(0, p.R0)
    i0_R = besseli(0, p.R)
    i1_R = besseli(1, p.R)
    k0_R = besselk(0, p.R)
    k1_R = besselk(1, p.R)
    e0 = (i1_R * k0 + k1_R * i0) / (i1_R * k0_r0 + k1_R * i0_r0)
    e_inf = (i0_R * k0 - k0_R * i0) / (i0_R * k0_r0 - k0_R * i0_r0)
    f_inf = (k0_r0 * i0 - i0_r0 * k0) / (k0_r0 * i0_R - i0_r0 * k0_R)
    return LimitProfiles(
        e0=e0, e_inf=e_inf, f_inf=f_inf,
        sigma=i0 / i0_R, sigma_prime=i1 / i0_R)


def limit_apoptosis(R):
    """Apoptosis rate in the strong-supply, vanishing-core limit."""
    if not R > 0.0:
        raise DomainError("R must be positive")
    return 2.0 * besseli(1, R) / (R * besseli(0, R))


def limit_pressure(p: ModelParams, r):
    """(p, p') in the strong-supply, vanishing-core limit.

    Obtained by taking the limit inside the closed form: sigma tends to
    I0(r)/I0(R), the ln-term coefficient vanishes with the core, and the
    apoptosis rate tends to :func:`limit_apoptosis`.  (The resolution of
    the I0(R)-vs-I1(R) normalization is pinned against the generic path in
    the test suite.)
    """
    if not 0.0 < r <= p.R * (1.0 + 1e-12):
        raise DomainError(f"need 0 < r <= R={p.R}, got r={r}")
    a_lim = limit_apoptosis(p.R)
    i0_R = besseli(0, p.R)
    val = (p.g_inv / p.R
           + (p.prolif - p.chi) * (1.0 - besseli(0, r) / i0_R)
           - 0.25 * p.prolif * a_lim * (p.R ** 2 - r * r))
    der = (0.5 * p.prolif * a_lim * r
           - (p.prolif - p.chi) * besseli(1, r) / i0_R)
    return val, der


def profile_rows(s: SteadyState, n, include_limit=False):
    """Rows for the steady CSV export: r, sigma, sigma_prime, p, p_prime,
    E, F (+ limit columns when asked)."""
    rs = np.linspace(s.R0, s.R, n)
    sig, sig_p, _ = sigma_grid(s, rs)
    pval, pder = pressure_grid(s, rs)
    e, f, _, _ = ef_grid(s, rs)
    cols = ["r", "sigma", "sigma_prime", "p", "p_prime", "E", "F"]
    data = [rs, sig, sig_p, pval, pder, e, f]
    if include_limit:
        lims = [steady_limits(s.params, r) for r in rs]
        plims = [limit_pressure(s.params, r) for r in rs]
        cols += ["sigma_limit", "sigma_prime_limit", "p_limit",
                 "p_prime_limit"]
        data += [np.array([l.sigma for l in lims]),
                 np.array([l.sigma_prime for l in lims]),
                 np.array([v for v, _ in plims]),
                 np.array([d for _, d in plims])]
    return cols, list(zip(*data))
