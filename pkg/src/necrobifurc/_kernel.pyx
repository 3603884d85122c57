# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled modified-Bessel kernels.

Same algorithms as :mod:`necrobifurc._kernel_py` (the import-time fallback);
see that module for the algorithm notes.  Keep the two in sync.
"""

from libc.math cimport log, exp, sqrt, lgamma, fabs, pi

BACKEND = "cython"

cdef double EULER_GAMMA = 0.5772156649015328606065120900824024
cdef double LN_BIG = 575.6462732485114210
cdef double BIG = 1e250
cdef double SERIES_TOL = 1e-17
cdef double CF2_TOL = 2.3e-16


class KernelDomainError(ValueError):
    """Argument outside the domain of a Bessel kernel."""


cdef double _i_series(int n, double x):
    cdef double q = 0.25 * x * x
    cdef double s = 1.0
    cdef double t = 1.0
    cdef int k = 0
    cdef int i
    cdef double pref = 1.0
    while k < 700:
        k += 1
        t *= q / (k * (n + k))
        s += t
        if t < s * SERIES_TOL:
            break
    for i in range(1, n + 1):
        pref *= 0.5 * x / i
    return pref * s


cdef double _i_series_ln(int n, double x):
    cdef double q = 0.25 * x * x
    cdef double s = 1.0
    cdef double t = 1.0
    cdef int k = 0
    while k < 700:
        k += 1
        t *= q / (k * (n + k))
        s += t
        if t < s * SERIES_TOL:
            break
    return n * log(0.5 * x) - lgamma(n + 1.0) + log(s)


cdef double _i_asym_scaled(int n, double x):
    cdef double mu = 4.0 * n * n
    cdef double s = 1.0
    cdef double t = 1.0
    cdef double sign = 1.0
    cdef int k = 0
    while k < 40:
        k += 1
        t *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x)
        sign = -sign
        s += sign * t
        if fabs(t) < fabs(s) * SERIES_TOL:
            break
    return s / sqrt(2.0 * pi * x)


cdef void _k01_scaled_series(double x, double* k0out, double* k1out):
    cdef double q = 0.25 * x * x
    cdef double lh = log(0.5 * x)
    cdef double i0 = _i_series(0, x)
    cdef double i1 = _i_series(1, x)
    cdef double s0 = 0.0, t = 1.0, h = 0.0
    cdef int k = 0
    while k < 60:
        k += 1
        t *= q / (<double>k * k)
        h += 1.0 / k
        s0 += h * t
        if h * t < (fabs(s0) + 1.0) * SERIES_TOL:
            break
    cdef double k0 = -(lh + EULER_GAMMA) * i0 + s0
    cdef double s1 = 0.0, u = 1.0, hk = 0.0, hk1 = 1.0, term
    k = 0
    while k < 60:
        term = (hk + hk1 - 2.0 * EULER_GAMMA) * u
        s1 += term
        k += 1
        u *= q / (<double>k * (k + 1))
        hk += 1.0 / k
        hk1 += 1.0 / (k + 1)
        if u * (hk + hk1 + 2.0) < (fabs(s1) + 1.0) * SERIES_TOL:
            break
    cdef double k1 = 1.0 / x + lh * i1 - 0.25 * x * s1
    cdef double e = exp(x)
    k0out[0] = e * k0
    k1out[0] = e * k1


cdef void _k01_scaled_cf2(double x, double* k0out, double* k1out):
    cdef double b = 2.0 * (1.0 + x)
    cdef double d = 1.0 / b
    cdef double h = d, delh = d
    cdef double q1 = 0.0, q2 = 1.0
    cdef double a1 = 0.25
    cdef double q = a1, c = a1, a = -a1
    cdef double s = 1.0 + q * delh
    cdef double qnew, dels
    cdef int i
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
        if fabs(dels / s) < CF2_TOL:
            break
    h = a1 * h
    cdef double k0 = sqrt(pi / (2.0 * x)) / s
    k0out[0] = k0
    k1out[0] = k0 * (x + 0.5 - h) / x


cdef void _k01_scaled(double x, double* k0out, double* k1out):
    if x <= 2.0:
        _k01_scaled_series(x, k0out, k1out)
    else:
        _k01_scaled_cf2(x, k0out, k1out)


cdef double _i_miller_scaled(int n, double x):
    cdef double k0, k1
    _k01_scaled(x, &k0, &k1)
    cdef double km = k0
    cdef double kk = k1
    cdef double tmp
    cdef int j
    for j in range(1, n + 1):
        tmp = kk
        kk = km + (2.0 * j / x) * kk
        km = tmp
    cdef double mx = x if x > n else <double>n
    cdef int m = <int>(mx + 2.0 * sqrt(mx) + 16.0)
    cdef double ip1 = 0.0
    cdef double ic = 1e-280
    j = m
    while j > n:
        tmp = ic
        ic = ip1 + (2.0 * j / x) * ic
        ip1 = tmp
        if ic > BIG:
            ic *= 1e-250
            ip1 *= 1e-250
        j -= 1
    return ic / (x * (ic * kk + ip1 * km))


cdef double _besseli(int n, double x):
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= (20.0 if 20.0 > 2.0 * n else 2.0 * n):
        return _i_series(n, x)
    if x >= 40.0 and n * n < x - 3.0:
        return _i_asym_scaled(n, x) * exp(x)
    return _i_miller_scaled(n, x) * exp(x)


cdef double _besseli_scaled(int n, double x):
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= (20.0 if 20.0 > 2.0 * n else 2.0 * n):
        return _i_series(n, x) * exp(-x)
    if x >= 40.0 and n * n < x - 3.0:
        return _i_asym_scaled(n, x)
    return _i_miller_scaled(n, x)


cdef double _besselk_scaled(int n, double x):
    cdef double k0, k1, tmp
    cdef int j
    _k01_scaled(x, &k0, &k1)
    if n == 0:
        return k0
    cdef double km = k0
    cdef double kk = k1
    for j in range(1, n):
        tmp = kk
        kk = km + (2.0 * j / x) * kk
        km = tmp
    return kk


def besseli(int n, double x):
    """I_n(x) for integer n >= 0, x >= 0."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x < 0.0:
        raise KernelDomainError("besseli needs x >= 0")
    return _besseli(n, x)


def besseli_scaled(int n, double x):
    """e^-x I_n(x)."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x < 0.0:
        raise KernelDomainError("besseli needs x >= 0")
    return _besseli_scaled(n, x)


def besseli_ln(int n, double x):
    """ln I_n(x); usable where I_n itself would over/underflow."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x <= 0.0:
        raise KernelDomainError("besseli_ln needs x > 0")
    if x <= (20.0 if 20.0 > 2.0 * n else 2.0 * n):
        return _i_series_ln(n, x)
    if x >= 40.0 and n * n < x - 3.0:
        return log(_i_asym_scaled(n, x)) + x
    return log(_i_miller_scaled(n, x)) + x


def besselk(int n, double x):
    """K_n(x) for integer n >= 0, x > 0."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x <= 0.0:
        raise KernelDomainError("besselk needs x > 0")
    return _besselk_scaled(n, x) * exp(-x)


def besselk_scaled(int n, double x):
    """e^x K_n(x); may overflow to inf for large n at small x."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x <= 0.0:
        raise KernelDomainError("besselk needs x > 0")
    return _besselk_scaled(n, x)


def besselk_ln(int n, double x):
    """ln K_n(x); upward recurrence with rescaling, never overflows."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x <= 0.0:
        raise KernelDomainError("besselk_ln needs x > 0")
    cdef double k0, k1, tmp
    _k01_scaled(x, &k0, &k1)
    if n == 0:
        return log(k0) - x
    cdef double c = 0.0
    cdef double km = k0
    cdef double kk = k1
    cdef int j
    for j in range(1, n):
        tmp = kk
        kk = km + (2.0 * j / x) * kk
        km = tmp
        if kk > BIG:
            km *= 1e-250
            kk *= 1e-250
            c += LN_BIG
    return log(kk) + c - x


def bessel_derivs(int n, double x):
    """(I_n'(x), K_n'(x)) via I_n' = I_{n-1} - (n/x) I_n and
    K_n' = -K_{n-1} - (n/x) K_n; for n = 0, (I_1, -K_1)."""
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    if x <= 0.0:
        raise KernelDomainError("bessel_derivs needs x > 0")
    if n == 0:
        return _besseli(1, x), -(_besselk_scaled(1, x) * exp(-x))
    cdef double nox = n / x
    cdef double ip = _besseli(n - 1, x) - nox * _besseli(n, x)
    cdef double kn1 = _besselk_scaled(n - 1, x) * exp(-x)
    cdef double kn = _besselk_scaled(n, x) * exp(-x)
    return ip, -kn1 - nox * kn


def besseli_grid(int n, double[:] xs, double[:] out):
    """Fill out[i] = I_n(xs[i])."""
    cdef Py_ssize_t i
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    for i in range(xs.shape[0]):
        if xs[i] < 0.0:
            raise KernelDomainError("besseli needs x >= 0")
        out[i] = _besseli(n, xs[i])


def besselk_grid(int n, double[:] xs, double[:] out):
    """Fill out[i] = K_n(xs[i])."""
    cdef Py_ssize_t i
    if n < 0:
        raise KernelDomainError("order must be >= 0")
    for i in range(xs.shape[0]):
        if xs[i] <= 0.0:
            raise KernelDomainError("besselk needs x > 0")
        out[i] = _besselk_scaled(n, xs[i]) * exp(-xs[i])
