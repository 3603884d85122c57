"""Verification suites: every lemma-level property, oracle agreement and
dual-path identity as a named, machine-checkable suite.

Each suite returns a :class:`SuiteResult`; the CLI ``verify`` subcommand
runs a selection and exits nonzero when any check fails.  The pytest
acceptance tests reuse these functions where the criteria coincide.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from .bessel import (
    besseli,
    besseli_ln,
    besseli_scaled,
    besselk,
    besselk_ln,
    besselk_scaled,
    bessel_derivs,
)
from .bifurcation import (
    _bifurcation_point_alt,
    bifurcation_function,
    bifurcation_function_forms,
    bifurcation_point,
    l2_positivity_check,
    limit_bifurcation_point,
)
from .errors import NecrobifurcError
from .modes import (
    a_l_sequence,
    b_l_sequence,
    build_mode,
    g0_eval,
    g_beta_eval,
    g_inf_eval,
    q_eval,
    q_eval_coeffs,
    q_grid,
    robin_residual,
)
from .oracle import (
    compare_to_closed_form,
    expansion_check_2d,
    solve_pressure_bvp,
    solve_q_bvp,
    solve_sigma_bvp,
)
from .params import ModelParams
from .steady import (
    build_steady_state,
    ef_grid,
    pressure_grid,
    sigma_eval,
    sigma_grid,
)

DEFAULT_PARAMS = ModelParams(beta=1.0, sigma_ul=0.5, R0=0.5, R=2.0,
                             chi=1.0, g_inv=1.0, prolif=1.0)


@dataclass
class VerifyConfig:
    """Knobs of the verification run; defaults match the acceptance
    criteria."""

    params: ModelParams = DEFAULT_PARAMS
    seed: int = 1234
    grid_n: int = 4096
    draws: int = 20
    property_draws: int = 200
    beta_values: tuple = (0.1, 1.0, 10.0)
    l_fix: int = 2
    l_max: int = 16
    oracle_ls: tuple = (0, 2, 5)
    shell_eps_rel: tuple = (0.1, 0.05, 0.025, 0.01)
    expansion_eps: tuple = (0.02, 0.01)
    expansion_grid: tuple = (512, 256)
    self_test_negative: bool = False


@dataclass
class SuiteResult:
    name: str
    passed: bool
    n_checks: int
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    oracle_entries: list = field(default_factory=list)

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        line = f"{status} {self.name}: {self.n_checks} checks, " \
               f"{len(self.failures)} failures ({self.seconds:.2f}s)"
        return line


class _Checker:
    def __init__(self):
        self.n = 0
        self.failures = []

    def check(self, ok, msg):
        self.n += 1
        if not ok:
            self.failures.append(msg)

    def result(self, name, t0, oracle_entries=None):
        return SuiteResult(name=name, passed=not self.failures,
                           n_checks=self.n, failures=self.failures[:50],
                           seconds=time.time() - t0,
                           oracle_entries=oracle_entries or [])


def random_params(rng):
    """A random valid parameter bundle for property draws."""
    r0 = rng.uniform(0.3, 1.2)
    return ModelParams(
        beta=10.0 ** rng.uniform(-1.0, 1.0),
        sigma_ul=rng.uniform(0.05, 0.9),
        R0=r0,
        R=r0 + rng.uniform(0.8, 2.5),
        chi=rng.uniform(0.0, 3.0),
        g_inv=10.0 ** rng.uniform(-1.0, 0.7),
        prolif=rng.uniform(0.2, 3.0),
    )


def suite_bessel(cfg: VerifyConfig):
    """Positivity/signs, the four recurrence rows, the Wronskian and the
    scaled/log consistency at seeded (n, x) samples."""
    t0 = time.time()
    ck = _Checker()
    rng = np.random.default_rng(cfg.seed)
    tol = 1e-11
    wron_tol = 1e-30 if cfg.self_test_negative else 1e-11
    for _ in range(200):
        n = int(rng.integers(0, 17))
        x = float(10.0 ** rng.uniform(-3.0, math.log10(50.0)))
        iv = besseli(n, x)
        kv = besselk(n, x)
        ip, kp = bessel_derivs(n, x)
        ck.check(iv > 0.0 and kv > 0.0, f"positivity fail n={n} x={x}")
        ck.check(ip > 0.0 and kp < 0.0, f"derivative sign fail n={n} x={x}")
        in1 = besseli(n + 1, x)
        kn1 = besselk(n + 1, x)
        # row 1: three-term recurrences (n >= 1)
        if n >= 1:
            im1 = besseli(n - 1, x)
            km1 = besselk(n - 1, x)
            ck.check(abs(in1 - (im1 - 2.0 * n / x * iv)) <= tol * abs(im1),
                     f"I recurrence fail n={n} x={x}")
            ck.check(abs(kn1 - (km1 + 2.0 * n / x * kv)) <= tol * kn1,
                     f"K recurrence fail n={n} x={x}")
            # row 2: half-sum derivative forms
            ck.check(abs(ip - 0.5 * (im1 + in1)) <= tol * abs(ip),
                     f"I half-sum deriv fail n={n} x={x}")
            ck.check(abs(kp + 0.5 * (km1 + kn1)) <= tol * abs(kp),
                     f"K half-sum deriv fail n={n} x={x}")
            # row 3: the forms used by bessel_derivs, re-evaluated
            ck.check(abs(ip - (im1 - n / x * iv)) <= tol * abs(ip),
                     f"I minus-form deriv fail n={n} x={x}")
            ck.check(abs(kp - (-km1 - n / x * kv)) <= tol * abs(kp),
                     f"K minus-form deriv fail n={n} x={x}")
        # row 4: plus-forms, valid for n >= 0
        ck.check(abs(ip - (n / x * iv + in1)) <= tol * abs(ip),
                 f"I plus-form deriv fail n={n} x={x}")
        ck.check(abs(kp - (n / x * kv - kn1)) <= tol * abs(kp),
                 f"K plus-form deriv fail n={n} x={x}")
        # Wronskian I_n K_{n+1} + I_{n+1} K_n = 1/x
        ck.check(abs(iv * kn1 + in1 * kv - 1.0 / x) <= wron_tol / x,
                 f"Wronskian fail n={n} x={x}")
        # scaled and log variants agree with the plain values
        ck.check(abs(besseli_scaled(n, x) * math.exp(x) - iv)
                 <= 1e-12 * abs(iv), f"I scaled fail n={n} x={x}")
        ck.check(abs(besselk_scaled(n, x) * math.exp(-x) - kv)
                 <= 1e-12 * abs(kv), f"K scaled fail n={n} x={x}")
        ck.check(abs(math.exp(besseli_ln(n, x)) - iv) <= 1e-11 * abs(iv),
                 f"I ln fail n={n} x={x}")
        ck.check(abs(math.exp(besselk_ln(n, x)) - kv) <= 1e-11 * abs(kv),
                 f"K ln fail n={n} x={x}")
    return ck.result("bessel", t0)


def suite_lemma31(cfg: VerifyConfig):
    """Boundary-data decomposition bounds/monotonicity, nutrient range and
    apoptosis positivity."""
    t0 = time.time()
    ck = _Checker()
    slack = 1e-12
    base = cfg.params
    for beta in cfg.beta_values:
        s = build_steady_state(base.with_(beta=float(beta)))
        rs = np.linspace(base.R0, base.R, 1001)
        e, f, ep, fp = ef_grid(s, rs)
        ck.check(np.all(e >= -slack) and np.all(e <= 1.0 + slack),
                 f"E out of [0,1] at beta={beta}")
        ck.check(np.all(f >= -slack) and np.all(f <= 1.0 + slack),
                 f"F out of [0,1] at beta={beta}")
        ck.check(np.all(ep <= slack), f"E' positive at beta={beta}")
        ck.check(np.all(fp >= -slack), f"F' negative at beta={beta}")
        ck.check(abs(e[0] - 1.0) <= 1e-12 and abs(f[0]) <= 1e-12,
                 f"E(R0), F(R0) anchor fail at beta={beta}")
        sig = sigma_grid(s, rs)[0]
        ck.check(np.max(np.abs(base.sigma_ul * e + f - sig)) <= 1e-13,
                 f"sigma decomposition identity fail at beta={beta}")
    rng = np.random.default_rng(cfg.seed + 1)
    for _ in range(cfg.property_draws):
        p = random_params(rng)
        s = build_steady_state(p)
        rs = np.linspace(p.R0, p.R, 512)
        sig, sig_p, _ = sigma_grid(s, rs)
        ck.check(np.all(sig >= -slack) and np.all(sig <= 1.0 + slack),
                 f"sigma out of [0,1] for {p}")
        ck.check(s.apopt >= 0.0, f"negative apoptosis for {p}")
        flux = rs * sig_p
        ck.check(np.all(np.diff(flux) >= -1e-12),
                 f"r*sigma' not nondecreasing for {p}")
    return ck.result("lemma3.1", t0)


def suite_lemma42(cfg: VerifyConfig):
    """G bounds and monotone growth at the figure parameter set."""
    t0 = time.time()
    ck = _Checker()
    slack = 1e-12
    base = cfg.params
    l = cfg.l_fix
    for beta in cfg.beta_values:
        p = base.with_(beta=float(beta))
        s = build_steady_state(p)
        m = build_mode(s, l)
        rs = np.linspace(p.R0, p.R, 1001)
        gs = np.empty_like(rs)
        gps = np.empty_like(rs)
        g0s = np.empty_like(rs)
        for i, r in enumerate(rs):
            gs[i], gps[i] = g_beta_eval(m, float(r))
            g0s[i], _ = g0_eval(m, float(r))
        ck.check(np.all(gps >= -slack), f"G' negative at beta={beta}")
        ck.check(abs(gs[0]) <= slack, f"G(R0) nonzero at beta={beta}")
        g0_R = g0s[-1]
        cap = min(g0_R, 1.0 / beta)
        ck.check(np.all(gs >= -slack) and np.all(gs <= cap + slack),
                 f"G outside [0, min(G0(R), 1/beta)] at beta={beta}")
        envelope = np.minimum(g0s, (rs / p.R) ** l / beta)
        ck.check(np.all(gs <= envelope + slack),
                 f"pointwise envelope fail at beta={beta}")
        ginf_R, _ = g_inf_eval(m, p.R)
        ck.check(abs(ginf_R - 1.0) <= 1e-12,
                 f"G_inf(R) != 1 at beta={beta}")
        q_R0, _ = q_eval(m, p.R0)
        ck.check(abs(q_R0) <= 1e-12 * max(1.0, abs(m.qcoef)),
                 f"Q(R0) nonzero at beta={beta}")
        ck.check(abs(robin_residual(m)) <= 1e-10 * max(1.0, abs(m.qcoef)),
                 f"Robin residual fail at beta={beta}")
    return ck.result("lemma4.2", t0)


def suite_lemma43_44(cfg: VerifyConfig):
    """Positivity and monotonicity of the a_l and b_l sequences."""
    t0 = time.time()
    ck = _Checker()
    rng = np.random.default_rng(cfg.seed + 2)
    for _ in range(10):
        p = random_params(rng)
        s = build_steady_state(p)
        radii = p.R0 + (p.R - p.R0) * np.array([0.2, 0.4, 0.6, 0.8, 1.0])
        for r in radii:
            a = a_l_sequence(s, float(r), cfg.l_max)
            ck.check(all(v > 0.0 for v in a), f"a_l <= 0 at r={r} for {p}")
            ck.check(all(b < x for x, b in zip(a, a[1:])),
                     f"a_l not decreasing at r={r} for {p}")
        b0, bR = b_l_sequence(s, cfg.l_max)
        ck.check(all(v > 0.0 for v in b0) and all(v > 0.0 for v in bR),
                 f"b_l <= 0 for {p}")
        ck.check(all(y < x for x, y in zip(b0, b0[1:])),
                 f"b_l(R0) not decreasing for {p}")
        ck.check(all(y > x for x, y in zip(bR, bR[1:])),
                 f"b_l(R) not increasing for {p}")
    return ck.result("lemma4.3/4.4", t0)


def suite_lemma46(cfg: VerifyConfig):
    """Thin-shell positivity and growth of L2, and its linear-in-width
    collapse onto sigma(R) - apoptosis."""
    t0 = time.time()
    ck = _Checker()
    p = cfg.params
    eps_values = [rel * p.R for rel in cfg.shell_eps_rel]
    rep = l2_positivity_check(p, eps_values, l_max=cfg.l_max)
    for entry in rep.entries:
        ck.check(entry.assumption_ok,
                 f"assumption sigma(R)-A>0 fails at shell {entry.shell_eps}")
    ok_entries = [e for e in rep.entries if e.assumption_ok]
    if ok_entries:
        smallest = min(ok_entries, key=lambda e: e.shell_eps)
        ck.check(smallest.all_positive,
                 f"L2 not positive at shell {smallest.shell_eps}")
        ck.check(smallest.increasing,
                 f"L2 not increasing at shell {smallest.shell_eps}")
        gaps = [e.gap_max for e in
                sorted(ok_entries, key=lambda e: -e.shell_eps)]
        ck.check(all(b < a for a, b in zip(gaps, gaps[1:])),
                 f"L2 gap not decreasing with shell width: {gaps}")
        # the lemma guarantees an O(width) collapse; accept at-least-linear
        # decay (the measured decay is in fact quadratic, the linear
        # coefficient cancels in thin shells)
        widths = sorted((e.shell_eps for e in ok_entries), reverse=True)
        for (g1, g2), (w1, w2) in zip(zip(gaps, gaps[1:]),
                                      zip(widths, widths[1:])):
            ratio = g1 / g2
            expected = w1 / w2
            ck.check(ratio >= 0.8 * expected,
                     f"L2 gap decay slower than linear: {ratio} vs "
                     f"{expected}")
    return ck.result("lemma4.6", t0)


def suite_oracle(cfg: VerifyConfig):
    """Closed forms against the FD solvers with Richardson orders."""
    t0 = time.time()
    ck = _Checker()
    entries = []
    rng = np.random.default_rng(cfg.seed + 3)
    n = cfg.grid_n
    for k in range(cfg.draws):
        p = random_params(rng)
        s = build_steady_state(p)
        rich = k < 3  # convergence orders on a few draws keep it fast
        prof = solve_sigma_bvp(p, n, richardson=rich)
        err = compare_to_closed_form(prof, sigma_grid(s, prof.r_values)[0])
        ck.check(err <= 1e-6, f"sigma oracle err {err} for {p}")
        if rich:
            ck.check(1.7 <= prof.convergence_order <= 2.3,
                     f"sigma order {prof.convergence_order} for {p}")
        entries.append(("sigma", n, err, prof.convergence_order))
        ps = solve_pressure_bvp(p, s, n, richardson=rich)
        err = compare_to_closed_form(ps.profile,
                                     pressure_grid(s, ps.profile.r_values)[0])
        ck.check(err <= 1e-6, f"pressure oracle err {err} for {p}")
        if rich:
            ck.check(1.7 <= ps.profile.convergence_order <= 2.3,
                     f"pressure order {ps.profile.convergence_order} for {p}")
        entries.append(("pressure", n, err, ps.profile.convergence_order))
        for l in cfg.oracle_ls:
            prof = solve_q_bvp(p, l, n, richardson=rich)
            m = build_mode(s, l)
            err = compare_to_closed_form(prof, q_grid(m, prof.r_values)[0])
            ck.check(err <= 1e-6, f"Q_{l} oracle err {err} for {p}")
            if rich:
                ck.check(1.7 <= prof.convergence_order <= 2.3,
                         f"Q_{l} order {prof.convergence_order} for {p}")
            entries.append((f"Q_{l}", n, err, prof.convergence_order))
    return ck.result("oracle", t0, oracle_entries=entries)


def suite_dualpath(cfg: VerifyConfig):
    """Agreement of independent evaluation paths."""
    t0 = time.time()
    ck = _Checker()
    rng = np.random.default_rng(cfg.seed + 4)
    for _ in range(100):
        p = random_params(rng)
        s = build_steady_state(p)
        l = int(rng.integers(0, 13))
        prolif = float(10.0 ** rng.uniform(-1.0, 1.0))
        f1, f2 = bifurcation_function_forms(s, l, prolif)
        scale = max(abs(f1), abs(f2), 1e-8)
        ck.check(abs(f1 - f2) <= 1e-10 * scale,
                 f"F forms disagree at l={l} for {p}: {f1} vs {f2}")
        m = build_mode(s, max(l, 1))
        if m.linear_ok:
            r = p.R0 + 0.37 * (p.R - p.R0)
            qa, qpa = q_eval(m, r)
            qb, qpb = q_eval_coeffs(m, r)
            qs = max(abs(m.qcoef), 1e-8)
            ck.check(abs(qa - qb) <= 1e-12 * qs and
                     abs(qpa - qpb) <= 1e-12 * qs,
                     f"Q paths disagree at l={m.l} for {p}")
        if l >= 1:
            try:
                res = bifurcation_point(s, l)
                alt = _bifurcation_point_alt(s, l)
                ck.check(abs(res.p_l - alt) <= 1e-12 * max(1.0, abs(alt)),
                         f"P_l groupings disagree at l={l} for {p}")
            except NecrobifurcError:
                pass  # degenerate L2 draws are legitimate
    return ck.result("dualpath", t0)


def suite_bifurcation(cfg: VerifyConfig):
    """Spot identities of the bifurcation formula."""
    t0 = time.time()
    ck = _Checker()
    rng = np.random.default_rng(cfg.seed + 5)
    for _ in range(25):
        p = random_params(rng)
        s = build_steady_state(p)
        res0 = bifurcation_point(s, 0)
        ck.check(res0.p_l == 0.0, f"P_0 != 0 for {p}")
    p = cfg.params
    s = build_steady_state(p.with_(chi=0.0))
    res1 = bifurcation_point(s, 1)
    ck.check(abs(res1.p_l) <= 1e-14, "P_1 at chi=0 not zero")
    ck.check(res1.translation_mode, "l=1 not flagged as translation mode")
    # necrosis factors: monotone in l.  necrosis_I saturates to 1.0 in
    # double precision once (R0/R)^{2l} drops below machine epsilon, so
    # strictness is only required while consecutive values are resolvable.
    s = build_steady_state(p)
    n1s = []
    n2s = []
    for l in range(1, 33):
        res = bifurcation_point(s, l)
        n1s.append(res.terms["necrosis_I"])
        n2s.append(res.terms["necrosis_II"])
    ck.check(all(0.0 < v <= 1.0 for v in n1s), "necrosis_I out of (0,1]")
    ck.check(all(0.0 < v < 1.0 for v in n2s), "necrosis_II out of (0,1)")
    ck.check(all(b > a or (b == a and 1.0 - a <= 1e-15)
                 for a, b in zip(n1s, n1s[1:])),
             "necrosis_I not increasing")
    ck.check(all(b < a for a, b in zip(n2s, n2s[1:])),
             "necrosis_II not decreasing")
    # F(P) changes sign across P_l
    for l in (2, 3, 5):
        res = bifurcation_point(s, l)
        lo = bifurcation_function(s, l, res.p_l * 0.9)
        hi = bifurcation_function(s, l, res.p_l * 1.1)
        ck.check(lo * hi < 0.0, f"no sign change across P_{l}")
        at = bifurcation_function(s, l, res.p_l)
        ck.check(abs(at) <= 1e-9 * max(abs(lo), abs(hi)),
                 f"F(P_{l}) not a root")
    # chemotaxis independence of the strong-supply limit
    p_lim = ModelParams(beta=1e6, sigma_ul=0.5, R0=1e-4, R=2.0, chi=1.0,
                        g_inv=1.0, prolif=1.0)
    s_lim = build_steady_state(p_lim)
    _, sig_p_R, _ = sigma_eval(s_lim, p_lim.R)
    for l in range(2, 9):
        m = build_mode(s_lim, l)
        q_R, _ = q_eval(m, p_lim.R)
        ck.check(abs(q_R + sig_p_R) <= 1e-3,
                 f"chemotaxis term not vanishing at l={l}")
        lim = limit_bifurcation_point(l, p_lim.R, p_lim.g_inv)
        ck.check(lim > 0.0, f"limit P_{l} not positive")
    return ck.result("bifurcation", t0)


def suite_expansion2d(cfg: VerifyConfig):
    """The epsilon^2 remainder decay of the two-term expansion."""
    t0 = time.time()
    ck = _Checker()
    rep = expansion_check_2d(cfg.params, cfg.l_fix, list(cfg.expansion_eps),
                             grid=cfg.expansion_grid)
    for ratio in rep.full_ratios:
        ck.check(3.0 <= ratio <= 5.0,
                 f"remainder ratio {ratio} outside [3, 5]")
    for ratio in rep.first_ratios:
        ck.check(1.5 <= ratio <= 2.5,
                 f"first-order ratio {ratio} outside [1.5, 2.5]")
    ck.check(rep.e_floor <= 1e-6,
             f"discretization floor {rep.e_floor} above 1e-6")
    return ck.result("expansion2d", t0)


SUITES = {
    "bessel": suite_bessel,
    "lemma3.1": suite_lemma31,
    "lemma4.2": suite_lemma42,
    "lemma4.3": suite_lemma43_44,
    "lemma4.4": suite_lemma43_44,
    "lemma4.6": suite_lemma46,
    "oracle": suite_oracle,
    "dualpath": suite_dualpath,
    "bifurcation": suite_bifurcation,
    "expansion2d": suite_expansion2d,
}

DEFAULT_SUITES = ("bessel", "lemma3.1", "lemma4.2", "lemma4.3", "lemma4.6",
                  "oracle", "dualpath", "bifurcation", "expansion2d")


def run_suites(names, cfg: VerifyConfig):
    """Run the named suites (deduplicated, in the given order)."""
    seen = set()
    results = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}")
        fn = SUITES[name]
        if fn in seen:
            continue
        seen.add(fn)
        results.append(fn(cfg))
    return results
