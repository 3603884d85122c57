"""Pure-Python modified-Bessel kernels (fallback backend).

Scalar routines for I_n(x), K_n(x) of non-negative integer order, their
exponentially scaled variants (e^-x I_n, e^x K_n) and natural logarithms.
The compiled extension ``necrobifurc._kernel`` implements the identical
algorithms; :mod:`necrobifurc.backend` picks whichever is importable.

Algorithm split:
  * I_n: ascending power series for x <= max(20, 2n); plain asymptotic
    series for large x and small order; otherwise Miller backward
    recurrence normalized through the Wronskian
    I_n(x) K_{n+1}(x) + I_{n+1}(x) K_n(x) = 1/x.
  * K_0, K_1: log-bearing ascending series for x <= 2; Steed's continued
    fraction (CF2) for x > 2.  A truncated asymptotic series cannot reach
    1e-13 relative accuracy until x ~ 19, so the continued fraction covers
    the middle range as well.
  * K_n: upward recurrence from K_0, K_1 (the stable direction).
"""

import math

BACKEND = "python"

_EULER_GAMMA = 0.5772156649015328606065120900824024
_LN_BIG = 575.6462732485114210  # ln(1e250), rescale step for log recurrences
_BIG = 1e250
_SERIES_TOL = 1e-17
_CF2_TOL = 2.3e-16


class KernelDomainError(ValueError):
    """Argument outside the domain of a Bessel kernel."""


def _i_series(n, x):
    """I_n(x) by the ascending series; positive terms, no cancellation."""
    q = 0.25 * x * x
    s = 1.0
    t = 1.0
    k = 0
    while k < 700:
        k += 1
        t *= q / (k * (n + k))
        s += t
        if t < s * _SERIES_TOL:
            break
    pref = 1.0
    for i in range(1, n + 1):
        pref *= 0.5 * x / i
    return pref * s


def _i_series_ln(n, x):
    """ln I_n(x) by the ascending series; safe for tiny (x/2)^n / n!."""
    q = 0.25 * x * x
    s = 1.0
    t = 1.0
    k = 0
    while k < 700:
        k += 1
        t *= q / (k * (n + k))
        s += t
        if t < s * _SERIES_TOL:
            break
    return n * math.log(0.5 * x) - math.lgamma(n + 1.0) + math.log(s)


def _i_asym_scaled(n, x):
    """e^-x I_n(x) by the large-argument expansion (small order only)."""
    mu = 4.0 * n * n
    s = 1.0
    t = 1.0
    sign = 1.0
    k = 0
    while k < 40:
        k += 1
        t *= (mu - (2.0 * k - 1.0) ** 2) / (8.0 * k * x)
        sign = -sign
        s += sign * t
        if abs(t) < abs(s) * _SERIES_TOL:
            break
    return s / math.sqrt(2.0 * math.pi * x)


def _k01_scaled_series(x):
    """(e^x K_0(x), e^x K_1(x)) via the log-bearing series, x <= 2."""
    q = 0.25 * x * x
    lh = math.log(0.5 * x)
    i0 = _i_series(0, x)
    i1 = _i_series(1, x)
    # K0 = -(ln(x/2) + gamma) I0 + sum_{k>=1} H_k q^k / (k!)^2
    s0 = 0.0
    t = 1.0
    h = 0.0
    k = 0
    while k < 60:
        k += 1
        t *= q / (k * k)
        h += 1.0 / k
        s0 += h * t
        if h * t < (abs(s0) + 1.0) * _SERIES_TOL:
            break
    k0 = -(lh + _EULER_GAMMA) * i0 + s0
    # K1 = 1/x + ln(x/2) I1 - (x/4) sum_k (H_k + H_{k+1} - 2 gamma) u_k,
    # u_k = q^k / (k! (k+1)!)
    s1 = 0.0
    u = 1.0
    hk = 0.0
    hk1 = 1.0
    k = 0
    while k < 60:
        term = (hk + hk1 - 2.0 * _EULER_GAMMA) * u
        s1 += term
        k += 1
        u *= q / (k * (k + 1))
        hk += 1.0 / k
        hk1 += 1.0 / (k + 1)
        if u * (hk + hk1 + 2.0) < (abs(s1) + 1.0) * _SERIES_TOL:
            break
    k1 = 1.0 / x + lh * i1 - 0.25 * x * s1
    e = math.exp(x)
    return e * k0, e * k1


def _k01_scaled_cf2(x):
    """(e^x K_0(x), e^x K_1(x)) via Steed's continued fraction, x > 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d
    delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25
    q = a1
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 40001):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _CF2_TOL:
            break
    h = a1 * h
    k0 = math.sqrt(math.pi / (2.0 * x)) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def _k01_scaled(x):
    if x <= 2.0:
        return _k01_scaled_series(x)
    return _k01_scaled_cf2(x)


def _i_miller_scaled(n, x):
    """e^-x I_n(x) by backward recurrence, Wronskian-normalized."""
    k0, k1 = _k01_scaled(x)
    # climb K to orders n, n+1 (upward recurrence is stable for K)
    km = k0
    kk = k1
    for j in range(1, n + 1):
        km, kk = kk, km + (2.0 * j / x) * kk
    # km = e^x K_n, kk = e^x K_{n+1}
    m = int(max(n, x) + 2.0 * math.sqrt(max(n, x)) + 16.0)
    ip1 = 0.0  # trial I at order j+1
    ic = 1e-280  # trial I at order j
    j = m
    while j > n:
        ip1, ic = ic, ip1 + (2.0 * j / x) * ic
        if ic > _BIG:
            # common rescale cancels in the normalization below
            ic *= 1e-250
            ip1 *= 1e-250
        j -= 1
    # ic, ip1 are trial values at orders n, n+1; scale so that the (scaled)
    # Wronskian I_n K_{n+1} + I_{n+1} K_n = 1/x holds
    return ic / (x * (ic * kk + ip1 * km))


def besseli(n, x):
    """I_n(x) for integer n >= 0, x >= 0."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x < 0.0:
        raise KernelDomainError("besseli needs x >= 0")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= max(20.0, 2.0 * n):
        return _i_series(n, x)
    if x >= 40.0 and n * n < x - 3.0:
        return _i_asym_scaled(n, x) * math.exp(x)
    return _i_miller_scaled(n, x) * math.exp(x)


def besseli_scaled(n, x):
    """e^-x I_n(x)."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x < 0.0:
        raise KernelDomainError("besseli needs x >= 0")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= max(20.0, 2.0 * n):
        return _i_series(n, x) * math.exp(-x)
    if x >= 40.0 and n * n < x - 3.0:
        return _i_asym_scaled(n, x)
    return _i_miller_scaled(n, x)


def besseli_ln(n, x):
    """ln I_n(x); usable where I_n itself would over/underflow."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x <= 0.0:
        raise KernelDomainError("besseli_ln needs x > 0")
    if x <= max(20.0, 2.0 * n):
        return _i_series_ln(n, x)
    if x >= 40.0 and n * n < x - 3.0:
        return math.log(_i_asym_scaled(n, x)) + x
    return math.log(_i_miller_scaled(n, x)) + x


def besselk(n, x):
    """K_n(x) for integer n >= 0, x > 0."""
    return besselk_scaled(n, x) * math.exp(-x)


def besselk_scaled(n, x):
    """e^x K_n(x); may overflow to inf for large n at small x."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x <= 0.0:
        raise KernelDomainError("besselk needs x > 0")
    k0, k1 = _k01_scaled(x)
    if n == 0:
        return k0
    km = k0
    kk = k1
    for j in range(1, n):
        km, kk = kk, km + (2.0 * j / x) * kk
    return kk


def besselk_ln(n, x):
    """ln K_n(x); upward recurrence with rescaling, never overflows."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x <= 0.0:
        raise KernelDomainError("besselk_ln needs x > 0")
    k0, k1 = _k01_scaled(x)
    if n == 0:
        return math.log(k0) - x
    c = 0.0
    km = k0
    kk = k1
    for j in range(1, n):
        km, kk = kk, km + (2.0 * j / x) * kk
        if kk > _BIG:
            km *= 1e-250
            kk *= 1e-250
            c += _LN_BIG
    return math.log(kk) + c - x


def bessel_derivs(n, x):
    """(I_n'(x), K_n'(x)) via I_n' = I_{n-1} - (n/x) I_n and
    K_n' = -K_{n-1} - (n/x) K_n; for n = 0, (I_1, -K_1)."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x <= 0.0:
        raise KernelDomainError("bessel_derivs needs x > 0")
    if n == 0:
        return besseli(1, x), -besselk(1, x)
    nox = n / x
    ip = besseli(n - 1, x) - nox * besseli(n, x)
    kp = -besselk(n - 1, x) - nox * besselk(n, x)
    return ip, kp


def besseli_grid(n, xs, out):
    """Fill out[i] = I_n(xs[i])."""
    for i in range(len(xs)):
        out[i] = besseli(n, xs[i])


def besselk_grid(n, xs, out):
    """Fill out[i] = K_n(xs[i])."""
    for i in range(len(xs)):
        out[i] = besselk(n, xs[i])
