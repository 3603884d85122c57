"""Linearized perturbation modes of the steady state.

For a boundary perturbation cos(l*theta), the nutrient correction has the
radial factor Q_l(r) = B1*I_l(r) + B2*K_l(r), vanishing at the necrotic
boundary and tied to the steady profile by the linearized Robin condition
at the tumor boundary.  An equivalent representation divides out the
boundary data: Q_l(r) = -(sigma''(R) + beta*sigma'(R)) * G(r) with G the
normalized radial Green's-like factor.  Both paths are implemented and
cross-checked.

High modes at small inner radius make K_l(R0) astronomically large, so all
I/K combinations here can be formed in the log domain (the signs of every
summand are known); the linear-domain path is used whenever representable
because it is cheaper and slightly sharper.
"""

from dataclasses import dataclass, replace
import math

import numpy as np

from .bessel import (
    besseli,
    besseli_grid,
    besseli_ln,
    besselk,
    besselk_grid,
    besselk_ln,
)
from .errors import DomainError
from .steady import SteadyState, sigma_eval, pressure_eval

_LN_HUGE = 680.0  # stay clear of exp overflow at ~709


def _logaddexp(a, b):
    if a < b:
        a, b = b, a
    if b == -math.inf:
        return a
    return a + math.log1p(math.exp(b - a))


def _log1mexp(d):
    """log(1 - e^-d) for d >= 0 (-inf at d = 0)."""
    if d <= 0.0:
        return -math.inf
    if d > 0.6931471805599453:
        return math.log1p(-math.exp(-d))
    return math.log(-math.expm1(-d))


@dataclass(frozen=True)
class _ModePieces:
    """Logarithms of the order-l Bessel data entering G and its variants."""

    l: int
    ln_i_r0: float   # ln I_l(R0)
    ln_k_r0: float   # ln K_l(R0)
    ln_i_R: float    # ln I_l(R)
    ln_k_R: float    # ln K_l(R)
    ln_ip_R: float   # ln I_l'(R)
    ln_kp_R: float   # ln |K_l'(R)|
    den_ln: float    # ln of the (positive) G denominator
    den0_ln: float   # beta = 0 variant
    deninf_ln: float  # beta -> inf variant (= ln numerator at R)


def _ln_iv_prime(l, x, ln_il, ln_il1):
    """ln I_l'(x) via the sum form (l/x) I_l + I_{l+1}; cancellation-free."""
    if l == 0:
        return ln_il1
    return _logaddexp(math.log(l / x) + ln_il, ln_il1)


def _ln_kv_prime_abs(l, x, ln_kl, ln_klm1):
    """ln |K_l'(x)| via K_{l-1} + (l/x) K_l; cancellation-free."""
    if l == 0:
        return ln_klm1  # |K_0'| = K_1, passed as ln_klm1
    return _logaddexp(ln_klm1, math.log(l / x) + ln_kl)


def _num_ln(pieces, ln_il_r, ln_kl_r):
    """ln of K_l(R0) I_l(r) - I_l(R0) K_l(r) (>= 0 for r >= R0)."""
    lead = pieces.ln_k_r0 + ln_il_r
    d = lead - (pieces.ln_i_r0 + ln_kl_r)
    return lead + _log1mexp(d)


def _nump_ln(pieces, l, r):
    """ln of K_l(R0) I_l'(r) - I_l(R0) K_l'(r) (both summands positive)."""
    ln_il = besseli_ln(l, r)
    ln_il1 = besseli_ln(l + 1, r)
    ln_kl = besselk_ln(l, r)
    ln_klm1 = besselk_ln(1, r) if l == 0 else besselk_ln(l - 1, r)
    ip = _ln_iv_prime(l, r, ln_il, ln_il1)
    kp = _ln_kv_prime_abs(l, r, ln_kl, ln_klm1)
    return _logaddexp(pieces.ln_k_r0 + ip, pieces.ln_i_r0 + kp)


def _build_pieces(l, R0, R, beta):
    ln_i_r0 = besseli_ln(l, R0)
    ln_k_r0 = besselk_ln(l, R0)
    ln_i_R = besseli_ln(l, R)
    ln_k_R = besselk_ln(l, R)
    ln_ip_R = _ln_iv_prime(l, R, ln_i_R, besseli_ln(l + 1, R))
    ln_kp_R = _ln_kv_prime_abs(
        l, R, ln_k_R, besselk_ln(1, R) if l == 0 else besselk_ln(l - 1, R))
    t1 = ln_k_r0 + ln_ip_R
    t2 = ln_i_r0 + ln_kp_R
    den0 = _logaddexp(t1, t2)
    lead = ln_k_r0 + ln_i_R
    deninf = lead + _log1mexp(lead - (ln_i_r0 + ln_k_R))
    den = den0 if beta == 0.0 else _logaddexp(den0, math.log(beta) + deninf)
    return _ModePieces(l, ln_i_r0, ln_k_r0, ln_i_R, ln_k_R,
                       ln_ip_R, ln_kp_R, den, den0, deninf)


@dataclass(frozen=True)
class ModeSolution:
    """Radial factor of the mode-l perturbation.

    b1, b2 weight I_l/K_l; they are NaN when the combination is only
    representable in the log domain (huge K_l(R0)), in which case every
    evaluator transparently uses the log path.  d1, d2 are the harmonic
    pressure coefficients, populated once a proliferation rate is supplied
    (see :func:`harmonic_coefficients`).
    """

    l: int
    b1: float
    b2: float
    steady: SteadyState
    qcoef: float      # -(sigma''(R) + beta*sigma'(R))
    g_R: float        # G(R)
    gp_R: float       # G'(R)
    gp_R0: float      # G'(R0)
    linear_ok: bool
    d1: float | None = None
    d2: float | None = None
    _pieces: _ModePieces = None

    @property
    def params(self):
        return self.steady.params

    def with_harmonic(self, prolif):
        """Copy with d1, d2 filled in for the given proliferation rate."""
        d1, d2 = harmonic_coefficients(self, prolif)
        return replace(self, d1=d1, d2=d2)


def build_mode(s: SteadyState, l) -> ModeSolution:
    """Construct the mode-l solution for a built steady state."""
    if l != int(l) or l < 0:
        raise DomainError(f"mode index must be a non-negative integer: {l!r}")
    l = int(l)
    p = s.params
    pieces = _build_pieces(l, p.R0, p.R, p.beta)
    _, sig_p_R, sig_pp_R = sigma_eval(s, p.R)
    qcoef = -(sig_pp_R + p.beta * sig_p_R)

    g_R = math.exp(_num_ln(pieces, pieces.ln_i_R, pieces.ln_k_R)
                   - pieces.den_ln)
    # the beta = 0 denominator IS the numerator derivative at R, so this
    # keeps G'(R) = 1 - beta G(R) exact up to rounding
    gp_R = math.exp(pieces.den0_ln - pieces.den_ln)
    gp_R0 = math.exp(_nump_ln(pieces, l, p.R0) - pieces.den_ln)

    # B1 = K_l(R0) * B, B2 = -I_l(R0) * B with B = qcoef / denominator
    pieces_ok = (pieces.ln_k_r0 < _LN_HUGE
                 and pieces.ln_k_r0 + pieces.ln_ip_R < _LN_HUGE)
    if qcoef == 0.0:
        linear_ok = pieces_ok
        b1 = 0.0 if linear_ok else math.nan
        b2 = 0.0 if linear_ok else math.nan
    else:
        ln_qc = math.log(abs(qcoef))
        ln_b1 = pieces.ln_k_r0 + ln_qc - pieces.den_ln
        ln_b2 = pieces.ln_i_r0 + ln_qc - pieces.den_ln
        linear_ok = (abs(ln_b1) < _LN_HUGE and abs(ln_b2) < _LN_HUGE
                     and pieces_ok)
        if linear_ok:
            sgn = math.copysign(1.0, qcoef)
            b1 = sgn * math.exp(ln_b1)
            b2 = -sgn * math.exp(ln_b2)
        else:
            b1 = math.nan
            b2 = math.nan
    return ModeSolution(l=l, b1=b1, b2=b2, steady=s, qcoef=qcoef,
                        g_R=g_R, gp_R=gp_R, gp_R0=gp_R0,
                        linear_ok=linear_ok, _pieces=pieces)


def _check_r(m: ModeSolution, r):
    s = m.steady
    slack = 1e-9 * (s.R - s.R0)
    if np.any(np.asarray(r) < s.R0 - slack) or np.any(np.asarray(r) > s.R + slack):
        raise DomainError(f"r must lie in [{s.R0}, {s.R}]")


def g_beta_eval(m: ModeSolution, r):
    """(G(r), G'(r)); G vanishes at R0 and G'(R) = 1 - beta G(R)."""
    _check_r(m, r)
    pieces = m._pieces
    num = _num_ln(pieces, besseli_ln(m.l, r), besselk_ln(m.l, r))
    nump = _nump_ln(pieces, m.l, r)
    return math.exp(num - pieces.den_ln), math.exp(nump - pieces.den_ln)


def g0_eval(m: ModeSolution, r):
    """The beta -> 0 variant (G_0(r), G_0'(r))."""
    _check_r(m, r)
    pieces = m._pieces
    num = _num_ln(pieces, besseli_ln(m.l, r), besselk_ln(m.l, r))
    nump = _nump_ln(pieces, m.l, r)
    return math.exp(num - pieces.den0_ln), math.exp(nump - pieces.den0_ln)


def g_inf_eval(m: ModeSolution, r):
    """The beta -> inf variant (G_inf(r), G_inf'(r)); G_inf(R) = 1."""
    _check_r(m, r)
    pieces = m._pieces
    num = _num_ln(pieces, besseli_ln(m.l, r), besselk_ln(m.l, r))
    nump = _nump_ln(pieces, m.l, r)
    return math.exp(num - pieces.deninf_ln), math.exp(nump - pieces.deninf_ln)


def q_eval(m: ModeSolution, r, extend=False):
    """(Q_l(r), Q_l'(r)) through the G-quotient path."""
    if not extend:
        _check_r(m, r)
    pieces = m._pieces
    num = _num_ln(pieces, besseli_ln(m.l, r), besselk_ln(m.l, r))
    nump = _nump_ln(pieces, m.l, r)
    return (m.qcoef * math.exp(num - pieces.den_ln),
            m.qcoef * math.exp(nump - pieces.den_ln))


def q_eval_coeffs(m: ModeSolution, r):
    """(Q_l(r), Q_l'(r)) through the explicit B1/B2 coefficients.

    Independent grouping from :func:`q_eval`; only available while the
    coefficients are representable (``m.linear_ok``).
    """
    _check_r(m, r)
    if not m.linear_ok:
        raise DomainError(
            f"mode l={m.l} at R0={m.steady.R0} is outside the linear-domain "
            "regime; use q_eval")
    l = m.l
    iv = besseli(l, r)
    kv = besselk(l, r)
    if l == 0:
        ip = besseli(1, r)
        kp = -besselk(1, r)
    else:
        ip = besseli(l - 1, r) - (l / r) * iv
        kp = -besselk(l - 1, r) - (l / r) * kv
    return m.b1 * iv + m.b2 * kv, m.b1 * ip + m.b2 * kp


def q_grid(m: ModeSolution, rs, extend=False):
    """Vectorized (Q_l, Q_l') over an array of radii."""
    rs = np.asarray(rs, dtype=np.float64)
    if not extend:
        _check_r(m, rs)
    if m.linear_ok:
        l = m.l
        iv = besseli_grid(l, rs)
        kv = besselk_grid(l, rs)
        if l == 0:
            ip = besseli_grid(1, rs)
            kp = -besselk_grid(1, rs)
        else:
            ip = besseli_grid(l - 1, rs) - (l / rs) * iv
            kp = -besselk_grid(l - 1, rs) - (l / rs) * kv
        return m.b1 * iv + m.b2 * kv, m.b1 * ip + m.b2 * kp
    q = np.empty_like(rs)
    qp = np.empty_like(rs)
    flat = rs.ravel()
    qf = q.ravel()
    qpf = qp.ravel()
    for i, r in enumerate(flat):
        qf[i], qpf[i] = q_eval(m, float(r), extend=extend)
    return q, qp


def robin_residual(m: ModeSolution):
    """sigma''(R) + Q_l'(R) + beta (sigma'(R) + Q_l(R)); zero for an exact
    mode."""
    s = m.steady
    beta = s.params.beta
    _, sig_p, sig_pp = sigma_eval(s, s.R)
    q, qp = q_eval(m, s.R)
    return sig_pp + qp + beta * (sig_p + q)


def a_l_sequence(s: SteadyState, r, l_max):
    """a_l(r) = G'(r;l)/G(r;l) - l/r for l = 1..l_max.

    Positive and strictly decreasing in l.  Undefined at r = R0 where G
    vanishes.
    """
    if l_max < 1:
        raise DomainError("l_max must be >= 1")
    if not r > s.R0:
        raise DomainError("a_l needs r > R0 (G vanishes at R0)")
    if r > s.R * (1.0 + 1e-12):
        raise DomainError(f"r must lie in ({s.R0}, {s.R}]")
    out = []
    for l in range(1, l_max + 1):
        m = build_mode(s, l)
        g, gp = g_beta_eval(m, r)
        out.append(gp / g - l / r)
    return out


def b_l_sequence(s: SteadyState, l_max):
    """(b_l(R0), b_l(R)) for l = 1..l_max, where b_l = G'(.; l).

    All positive; decreasing in l at R0 and increasing in l at R.
    """
    if l_max < 1:
        raise DomainError("l_max must be >= 1")
    at_r0 = []
    at_R = []
    for l in range(1, l_max + 1):
        m = build_mode(s, l)
        at_r0.append(m.gp_R0)
        at_R.append(m.gp_R)
    return at_r0, at_R


def harmonic_coefficients(m: ModeSolution, prolif):
    """(D1, D2) of the harmonic part of the mode-l pressure.

    Solves l (D1 R0^{l-1} - D2 R0^{-(l+1)}) = prolif * Q_l'(R0) and
    D1 R^l + D2 R^{-l} = g_inv (l^2-1)/R^2 - p_s'(R) + (prolif-chi) Q_l(R),
    with the radius powers grouped as ratios so large l stays finite.
    """
    if m.l == 0:
        raise DomainError("l = 0 has no harmonic part; use l0_mode")
    l = m.l
    s = m.steady
    p = s.params
    R0, R = p.R0, p.R
    q_R, _ = q_eval(m, R)
    _, qp_R0 = q_eval(m, R0)
    _, ps_p_R = pressure_eval(s, R)
    t = (p.g_inv * (l * l - 1.0) / (R * R)
         + (prolif - p.chi) * q_R - ps_p_R)
    qr = R0 / R
    q2l = math.exp(2.0 * l * math.log(qr))
    ql1 = math.exp((l + 1.0) * math.log(qr))
    d1 = (ql1 * R * (prolif / l) * qp_R0 + t) / ((1.0 + q2l) * R ** l)
    d2 = (R0 ** l) * (-R0 * (prolif / l) * qp_R0
                      + math.exp(l * math.log(qr)) * t) / (1.0 + q2l)
    return d1, d2


def l0_mode(m: ModeSolution, prolif):
    """(p1(R), dp1/dr(R)) for the radially symmetric perturbation l = 0.

    The harmonic part is then a constant: p1 + (prolif - chi) sigma1 = D,
    so p1(R) = -g_inv/R^2 - p_s'(R) and dp1/dr = -(prolif - chi) Q_0'(R).
    """
    if m.l != 0:
        raise DomainError(f"l0_mode needs the l = 0 mode, got l={m.l}")
    s = m.steady
    p = s.params
    _, ps_p_R = pressure_eval(s, s.R)
    p1 = -p.g_inv / (s.R * s.R) - ps_p_R
    _, qp_R = q_eval(m, s.R)
    dp1 = -(prolif - p.chi) * qp_R
    return p1, dp1


def mode_limits(l, R, r):
    """(Q_l, Q_l') in the strong-supply, vanishing-core limit (l >= 2)."""
    if l < 2:
        raise DomainError(f"mode limit needs l >= 2, got l={l}")
    if not 0.0 < r <= R * (1.0 + 1e-12):
        raise DomainError(f"need 0 < r <= R={R}, got r={r}")
    ratio = besseli(1, R) / besseli(0, R)
    il_R = besseli(l, R)
    il = besseli(l, r)
    ilp = besseli(l - 1, r) - (l / r) * il
    return -ratio * il / il_R, -ratio * ilp / il_R


def mode_profile_rows(s: SteadyState, ls, n):
    """Rows for the modes CSV export: l, r, Q, Q_prime, G, G_prime, a_l,
    b_l (a_l is NaN at r = R0 where G vanishes)."""
    rows = []
    rs = np.linspace(s.R0, s.R, n)
    for l in sorted(set(int(l) for l in ls)):
        m = build_mode(s, l)
        q, qp = q_grid(m, rs)
        for i, r in enumerate(rs):
            g, gp = g_beta_eval(m, float(r))
            if r > s.R0 and l >= 1:
                a_l = gp / g - l / r
            else:
                a_l = math.nan
            rows.append((l, float(r), float(q[i]), float(qp[i]), g, gp,
                         a_l, gp))
    return ["l", "r", "Q", "Q_prime", "G", "G_prime", "a_l", "b_l"], rows
