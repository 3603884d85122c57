"""Bifurcation points of the radially symmetric steady state.

A boundary perturbation cos(l*theta) admits a stationary branch exactly
where the linearized free-boundary condition vanishes; the root in the
proliferation rate has the closed form P_l = L1/L2 with

  L1 = (l/R) * necrosis_I * (surface_tension - chemotaxis)
  L2 = nutrient_at_boundary - apoptosis + Lambda

where necrosis_I = (1-(R0/R)^{2l})/(1+(R0/R)^{2l}) and Lambda collects the
mode-flux terms Q_l'(R) - (l/R) necrosis_I Q_l(R) - necrosis_II Q_l'(R0)
with necrosis_II = 1/(((R/R0)^{l+1} + (R0/R)^{l-1})/2).

The bifurcation function is evaluated through two independent groupings
(the harmonic-coefficient assembly and L1 - P*L2); their agreement is a
free correctness check exercised by the test suite.

Sign bookkeeping: this module stores F(P) in the grouped form
P*(apoptosis - nutrient - Q_l'(R)) + harmonic-derivative part, which is
numerically identical to the root-finding (Frechet) form L1 - P*L2; the
identity is asserted in the tests rather than at runtime.
"""

from dataclasses import dataclass, field
import math

from .bessel import besseli
from .errors import (
    DegenerateDenominatorError,
    DomainError,
)
from .modes import (
    build_mode,
    harmonic_coefficients,
    l0_mode,
    q_eval,
)
from .params import ModelParams
from .steady import (
    SteadyState,
    build_steady_state,
    pressure_second,
    sigma_eval,
)

# Qualitative monotonicity study (vascularized, unit core).  The taxis
# term scales like chi/beta, so at beta = 1e4 a chi sweep 1 -> 100 moves
# P_l by under one percent and no (R, g_inv) in {1.5,2,3,5} x {0.1,1}
# loses monotonicity (it would need g_inv <= ~1e-3 there).  The recorded
# pair below reproduces the full qualitative picture (monotone at chi = 1,
# lost at chi = 100, limiting curve monotone) at beta = 100, consistent
# with taxis effects strengthening at weaker vascularization.
FIG4_BETA = 1.0e4
FIG4_R0 = 1.0
FIG4_R = 2.0
FIG4_GINV = 0.1
FIG4_CHI_VALUES = (1.0, 10.0, 50.0, 100.0)
FIG4_SIGMA_UL = 0.5
MONOTONE_LOSS_BETA = 100.0  # beta at which the recorded pair shows the loss


@dataclass(frozen=True)
class CurvatureLinearization:
    """First-order curvature data of an eps-perturbed circle."""

    kappa0: float        # curvature of the circle, 1/R
    kappa1_coeff: float  # coefficient of cos(l theta) in kappa1


def curvature_linearization(l, R):
    """Curvature linearization for the perturbation cos(l*theta).

    kappa = kappa0 + eps*kappa1 + O(eps^2) with kappa0 = 1/R and
    kappa1 = -(R1 + R1_thetatheta)/R^2 = (l^2-1)/R^2 * cos(l theta).
    """
    if not R > 0.0:
        raise DomainError("R must be positive")
    return CurvatureLinearization(kappa0=1.0 / R,
                                  kappa1_coeff=(l * l - 1.0) / (R * R))


def _necrosis_factors(l, R0, R):
    """(necrosis_I, necrosis_II); both in (0,1) for l >= 1, and defined as
    0 for l = 0 where the harmonic part degenerates to a constant."""
    if l == 0:
        return 0.0, 0.0
    ln_ratio = math.log(R / R0)
    q2l = math.exp(-2.0 * l * ln_ratio)
    n1 = (1.0 - q2l) / (1.0 + q2l)
    # 1 / ( ((R/R0)^{l+1} + (R0/R)^{l-1}) / 2 ), formed in the log domain
    # so large l at small R0 cannot overflow
    big = (l + 1.0) * ln_ratio
    small = -(l - 1.0) * ln_ratio
    n2 = math.exp(math.log(2.0) - (big + math.log1p(math.exp(small - big))))
    return n1, n2


@dataclass(frozen=True)
class BifurcationResult:
    """P_l = L1/L2 with its physical term decomposition."""

    l: int
    p_l: float
    L1: float
    L2: float
    terms: dict = field(default_factory=dict)
    translation_mode: bool = False  # l = 1: surface tension drops out


def _assemble(s: SteadyState, l):
    """L1, L2 and the named decomposition for mode l."""
    p = s.params
    R = p.R
    sig_R, sig_p_R, _ = sigma_eval(s, R)
    m = build_mode(s, l)
    q_R, qp_R = q_eval(m, R)
    _, qp_R0 = q_eval(m, p.R0)
    n1, n2 = _necrosis_factors(l, p.R0, R)
    surface = p.g_inv * (l * l - 1.0) / (R * R)
    chemo = p.chi * (q_R + sig_p_R)
    lam = qp_R - (l / R) * n1 * q_R - n2 * qp_R0
    L1 = (l / R) * n1 * (surface - chemo)
    L2 = sig_R - s.apopt + lam
    terms = {
        "necrosis_I": n1,
        "necrosis_II": n2,
        "surface_tension": surface,
        "chemotaxis": chemo,
        "nutrient_at_boundary": sig_R,
        "apoptosis": s.apopt,
        "lambda": lam,
        "lambda_qprime_R": qp_R,
        "lambda_mode_flux": -(l / R) * n1 * q_R,
        "lambda_necrosis_II": -n2 * qp_R0,
    }
    return L1, L2, terms


def bifurcation_point(s: SteadyState, l) -> BifurcationResult:
    """P_l = L1/L2 with full decomposition; P_0 = 0 identically.

    Raises :class:`DegenerateDenominatorError` instead of returning an
    infinite or NaN quotient when L2 vanishes.
    """
    if l != int(l) or l < 0:
        raise DomainError(f"mode index must be a non-negative integer: {l!r}")
    l = int(l)
    L1, L2, terms = _assemble(s, l)
    if l == 0:
        return BifurcationResult(l=0, p_l=0.0, L1=0.0, L2=L2, terms=terms)
    if L2 == 0.0 or abs(L2) < 1e-14 * abs(L1):
        raise DegenerateDenominatorError(
            f"L2={L2} degenerate against L1={L1} at l={l}")
    return BifurcationResult(l=l, p_l=L1 / L2, L1=L1, L2=L2, terms=terms,
                             translation_mode=(l == 1))


def _bifurcation_point_alt(s: SteadyState, l):
    """P_l through the raw-power grouping (R^{2l} etc. formed literally).

    Equivalent regrouping of the same closed form, used as a consistency
    check for moderate l where the literal powers are representable.
    """
    if l < 1:
        raise DomainError("alt grouping needs l >= 1")
    p = s.params
    R0, R = p.R0, p.R
    sig_R, sig_p_R, _ = sigma_eval(s, R)
    _, sig_p_R0, _ = sigma_eval(s, R0)
    m = build_mode(s, l)
    q_R, qp_R = q_eval(m, R)
    _, qp_R0 = q_eval(m, R0)
    pw = R ** (2 * l) + R0 ** (2 * l)
    coef = l * (R ** (2 * l - 1) - R0 ** (2 * l) / R) / pw
    n2 = 2.0 * R0 ** (l + 1) * R ** (l - 1) / pw
    apopt = 2.0 * (R * sig_p_R - R0 * sig_p_R0) / (R * R - R0 * R0)
    surface = p.g_inv * (l * l - 1.0) / (R * R)
    chemo = p.chi * (q_R + sig_p_R)
    L1 = coef * (surface - chemo)
    L2 = sig_R - apopt + qp_R - coef * q_R - n2 * qp_R0
    return L1 / L2


def bifurcation_function_forms(s: SteadyState, l, prolif):
    """The two groupings of F(P).

    form 1 assembles P*(apoptosis - nutrient - Q_l'(R)) plus the harmonic
    derivative l D1 R^{l-1} - l D2 R^{-l-1} (the constant-mode value for
    l = 0, where that derivative contributes nothing); form 2 is the
    root-finding grouping L1 - P*L2.
    """
    if l != int(l) or l < 0:
        raise DomainError(f"mode index must be a non-negative integer: {l!r}")
    l = int(l)
    p = s.params
    R = p.R
    # the steady pressure constants depend on the proliferation rate; the
    # function is evaluated at the requested one
    if prolif != p.prolif:
        s = build_steady_state(p.with_(prolif=prolif))
    sig_R, sig_p_R, sig_pp_R = sigma_eval(s, R)
    m = build_mode(s, l)
    _, qp_R = q_eval(m, R)
    if l == 0:
        # raw Frechet assembly through the constant harmonic mode
        _, dp1 = l0_mode(m, prolif)
        form1 = (dp1 + pressure_second(s, R)
                 - p.chi * (qp_R + sig_pp_R))
    else:
        d1, d2 = harmonic_coefficients(m, prolif)
        form1 = (prolif * (s.apopt - sig_R - qp_R)
                 + l * d1 * R ** (l - 1) - l * d2 * R ** (-l - 1))
    L1, L2, _ = _assemble(s, l)
    form2 = L1 - prolif * L2
    return form1, form2


def bifurcation_function(s: SteadyState, l, prolif):
    """F(P) whose root in P marks the mode-l bifurcation point."""
    form1, _ = bifurcation_function_forms(s, l, prolif)
    return form1


def limit_bifurcation_point(l, R, g_inv):
    """P_l in the strong-supply, vanishing-core limit.

    Independent of the taxis coefficient: the chemotaxis term of L1 decays
    with the core because Q_l(R) + sigma'(R) -> 0.
    """
    if l != int(l) or l < 0:
        raise DomainError(f"mode index must be a non-negative integer: {l!r}")
    if not R > 0.0:
        raise DomainError("R must be positive")
    l = int(l)
    if l <= 1:
        return 0.0
    t = besseli(1, R) / besseli(0, R)
    il = besseli(l, R)
    ilp = besseli(l - 1, R) - (l / R) * il
    den = 1.0 - (2.0 / R) * t - t * (ilp / il - l / R)
    num = g_inv * (l ** 3 - l) / R ** 3
    if abs(den) < 1e-14 * max(1.0, abs(num)):
        raise DegenerateDenominatorError(
            f"limit denominator degenerate at l={l}, R={R}")
    return num / den


@dataclass(frozen=True)
class ChiScan:
    """P_l over one taxis value."""

    chi: float
    ls: list
    p_ls: list           # NaN where the denominator degenerated
    monotone: bool       # strictly increasing across valid consecutive l
    first_descent: int | None
    degenerate_ls: list


@dataclass(frozen=True)
class MonotonicityReport:
    params: ModelParams
    l_range: tuple
    scans: list
    limit_p_ls: list
    limit_monotone: bool


def _monotone_info(ls, values):
    first_descent = None
    monotone = True
    prev = None
    prev_l = None
    for l, v in zip(ls, values):
        if math.isnan(v):
            continue
        if prev is not None and v <= prev:
            monotone = False
            if first_descent is None:
                first_descent = l
        prev, prev_l = v, l
    return monotone, first_descent


def monotonicity_scan(p: ModelParams, l_range, chi_values):
    """P_l sequences over a range of modes for each taxis value.

    Flags whether each sequence increases strictly in l and where the
    first descent happens; the limiting curve is reported alongside.
    """
    l_lo, l_hi = int(l_range[0]), int(l_range[1])
    if not (2 <= l_lo <= l_hi <= 32):
        raise DomainError("l_range must satisfy 2 <= lo <= hi <= 32")
    if len(chi_values) == 0:
        raise DomainError("chi_values must be non-empty")
    ls = list(range(l_lo, l_hi + 1))
    scans = []
    for chi in chi_values:
        s = build_steady_state(p.with_(chi=float(chi)))
        vals = []
        degen = []
        for l in ls:
            try:
                vals.append(bifurcation_point(s, l).p_l)
            except DegenerateDenominatorError:
                vals.append(math.nan)
                degen.append(l)
        monotone, first_descent = _monotone_info(ls, vals)
        scans.append(ChiScan(chi=float(chi), ls=ls, p_ls=vals,
                             monotone=monotone, first_descent=first_descent,
                             degenerate_ls=degen))
    limit_vals = [limit_bifurcation_point(l, p.R, p.g_inv) for l in ls]
    limit_monotone, _ = _monotone_info(ls, limit_vals)
    return MonotonicityReport(params=p, l_range=(l_lo, l_hi), scans=scans,
                              limit_p_ls=limit_vals,
                              limit_monotone=limit_monotone)


@dataclass(frozen=True)
class ShellEntry:
    """L2 behavior for one thin-shell width (R0 = R - shell_eps).

    ``shell_eps`` is the geometric shell width; it is unrelated to the
    perturbation amplitude of the expansion study.
    """

    shell_eps: float
    assumption_ok: bool
    sigma_R_minus_apopt: float
    l_values: list
    L2_values: list
    all_positive: bool
    increasing: bool
    violation_l: int | None
    gap_max: float  # max_l |L2(l) - (sigma(R) - apoptosis)|
    error: str | None


@dataclass(frozen=True)
class ShellReport:
    params: ModelParams
    entries: list


def l2_positivity_check(p: ModelParams, eps_values, l_max=16):
    """Thin-shell behavior of L2: positivity, growth in l, and the
    linear-in-eps collapse onto sigma(R) - apoptosis.

    Entries with sigma(R) - apoptosis <= 0 are recorded as
    AssumptionViolated and their scan is skipped (no exception escapes).
    """
    if l_max < 1:
        raise DomainError("l_max must be >= 1")
    entries = []
    for eps in eps_values:
        eps = float(eps)
        if not 0.0 < eps < p.R:
            raise DomainError(f"shell width must lie in (0, R), got {eps}")
        params = p.with_(R0=p.R - eps)
        s = build_steady_state(params)
        sig_R, _, _ = sigma_eval(s, p.R)
        gap0 = sig_R - s.apopt
        if not gap0 > 0.0:
            entries.append(ShellEntry(
                shell_eps=eps, assumption_ok=False,
                sigma_R_minus_apopt=gap0, l_values=[], L2_values=[],
                all_positive=False, increasing=False, violation_l=None,
                gap_max=math.nan, error="AssumptionViolated"))
            continue
        ls = list(range(1, l_max + 1))
        l2s = []
        for l in ls:
            _, L2, _ = _assemble(s, l)
            l2s.append(L2)
        all_pos = all(v > 0.0 for v in l2s)
        increasing = all(b > a for a, b in zip(l2s, l2s[1:]))
        violation = None
        for i, v in enumerate(l2s):
            bad_pos = not v > 0.0
            bad_mono = i > 0 and not v > l2s[i - 1]
            if bad_pos or bad_mono:
                violation = ls[i]
                break
        gap_max = max(abs(v - gap0) for v in l2s)
        entries.append(ShellEntry(
            shell_eps=eps, assumption_ok=True, sigma_R_minus_apopt=gap0,
            l_values=ls, L2_values=l2s, all_positive=all_pos,
            increasing=increasing, violation_l=violation, gap_max=gap_max,
            error=None))
    return ShellReport(params=p, entries=entries)


SWEEP_COLS = ["l", "chi", "P_l", "L1", "L2", "necrosis_I", "necrosis_II",
              "surface_tension", "chemotaxis_term", "monotone_flag"]


def sweep_rows(p: ModelParams, l_values, chi_values):
    """Rows for the bifurcation CSV: l, chi, P_l, L1, L2, necrosis_I,
    necrosis_II, surface_tension, chemotaxis_term, monotone_flag; sorted
    by (chi, l); degenerate denominators yield NaN rows."""
    rows = []
    for chi in sorted(float(c) for c in chi_values):
        s = build_steady_state(p.with_(chi=chi))
        vals = {}
        results = {}
        for l in sorted(int(l) for l in l_values):
            try:
                res = bifurcation_point(s, l)
                vals[l] = res.p_l
                results[l] = res
            except DegenerateDenominatorError:
                vals[l] = math.nan
                results[l] = None
        scan_ls = [l for l in sorted(vals) if l >= 2]
        monotone, _ = _monotone_info(scan_ls, [vals[l] for l in scan_ls])
        for l in sorted(vals):
            res = results[l]
            if res is None:
                L1, L2, terms = _assemble(s, l)
                rows.append((l, chi, math.nan, L1, L2,
                             terms["necrosis_I"], terms["necrosis_II"],
                             terms["surface_tension"], terms["chemotaxis"],
                             int(monotone)))
            else:
                rows.append((l, chi, res.p_l, res.L1, res.L2,
                             res.terms["necrosis_I"],
                             res.terms["necrosis_II"],
                             res.terms["surface_tension"],
                             res.terms["chemotaxis"], int(monotone)))
    return list(SWEEP_COLS), rows


def fig4_params():
    """ModelParams of the recorded strong-supply monotonicity study."""
    return ModelParams(beta=FIG4_BETA, sigma_ul=FIG4_SIGMA_UL, R0=FIG4_R0,
                       R=FIG4_R, chi=1.0, g_inv=FIG4_GINV, prolif=1.0)


def find_monotonicity_config(r_candidates=(1.5, 2.0, 3.0, 5.0),
                             g_inv_candidates=(0.1, 1.0),
                             chi_low=1.0, chi_high=100.0,
                             beta=FIG4_BETA, R0=FIG4_R0,
                             sigma_ul=FIG4_SIGMA_UL, l_hi=16):
    """Scan (R, g_inv) for the qualitative monotonicity-loss picture.

    Returns the first (R, g_inv) whose P_l sequence increases strictly at
    chi_low, loses monotonicity at chi_high, and whose limiting curve
    increases; None when the small grid has no such configuration.
    """
    for R in r_candidates:
        if not R > R0:
            continue
        for g_inv in g_inv_candidates:
            p = ModelParams(beta=beta, sigma_ul=sigma_ul, R0=R0, R=R,
                            chi=chi_low, g_inv=g_inv, prolif=1.0)
            rep = monotonicity_scan(p, (2, l_hi), [chi_low, chi_high])
            lo, hi = rep.scans[0], rep.scans[1]
            if lo.monotone and not hi.monotone and rep.limit_monotone:
                return R, g_inv
    return None
