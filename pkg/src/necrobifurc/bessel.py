"""Modified Bessel functions I_n, K_n of integer order.

Thin, validating wrappers over the selected kernel backend, plus the
convenience container :class:`BesselEval` and vectorized grid evaluators.
All functions are pure and thread-safe.

Only non-negative integer orders and real arguments are supported; that is
all the annulus formulas need.
"""

from dataclasses import dataclass

import numpy as np

from .backend import kernel
from .errors import DomainError


def _check_order(n):
    if n != int(n) or n < 0:
        raise DomainError(f"order must be a non-negative integer, got {n!r}")
    return int(n)


def besseli(n, x):
    """I_n(x).  Requires x >= 0; x = 0 gives the series leading term."""
    n = _check_order(n)
    if x < 0.0:
        raise DomainError(f"besseli needs x >= 0, got x={x}")
    return kernel.besseli(n, float(x))


def besselk(n, x):
    """K_n(x).  Requires x > 0 (K diverges at the origin)."""
    n = _check_order(n)
    if x <= 0.0:
        raise DomainError(f"besselk needs x > 0, got x={x}")
    return kernel.besselk(n, float(x))


def besseli_scaled(n, x):
    """e^-x I_n(x); overflow-free for large arguments."""
    n = _check_order(n)
    if x < 0.0:
        raise DomainError(f"besseli needs x >= 0, got x={x}")
    return kernel.besseli_scaled(n, float(x))


def besselk_scaled(n, x):
    """e^x K_n(x); overflow-free for large arguments."""
    n = _check_order(n)
    if x <= 0.0:
        raise DomainError(f"besselk needs x > 0, got x={x}")
    return kernel.besselk_scaled(n, float(x))


def besseli_ln(n, x):
    """ln I_n(x); finite even where I_n(x) would over/underflow."""
    n = _check_order(n)
    if x <= 0.0:
        raise DomainError(f"besseli_ln needs x > 0, got x={x}")
    return kernel.besseli_ln(n, float(x))


def besselk_ln(n, x):
    """ln K_n(x); finite even where K_n(x) would overflow."""
    n = _check_order(n)
    if x <= 0.0:
        raise DomainError(f"besselk_ln needs x > 0, got x={x}")
    return kernel.besselk_ln(n, float(x))


def bessel_derivs(n, x):
    """(I_n'(x), K_n'(x)).

    Computed through I_n' = I_{n-1} - (n/x) I_n and
    K_n' = -K_{n-1} - (n/x) K_n (I_1 and -K_1 for n = 0); the remaining
    recurrence forms agree with these to roundoff and are exercised in the
    test suite.
    """
    n = _check_order(n)
    if x <= 0.0:
        raise DomainError(f"bessel_derivs needs x > 0, got x={x}")
    return kernel.bessel_derivs(n, float(x))


def besseli_grid(n, xs):
    """Vectorized I_n over a numpy array of arguments (any shape)."""
    n = _check_order(n)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    out = np.empty_like(xs)
    kernel.besseli_grid(n, xs.ravel(), out.reshape(-1))
    return out


def besselk_grid(n, xs):
    """Vectorized K_n over a numpy array of arguments (any shape)."""
    n = _check_order(n)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    out = np.empty_like(xs)
    kernel.besselk_grid(n, xs.ravel(), out.reshape(-1))
    return out


@dataclass(frozen=True)
class BesselEval:
    """I_n, K_n and their derivatives at one point.

    ``scaled=True`` means value_i carries e^-x and value_k carries e^x
    (derivatives are then scaled the same way).
    """

    order: int
    argument: float
    value_i: float
    value_k: float
    deriv_i: float
    deriv_k: float
    scaled: bool = False


def bessel_eval(n, x, scaled=False):
    """Evaluate the full :class:`BesselEval` bundle at (n, x)."""
    n = _check_order(n)
    if x <= 0.0:
        raise DomainError(f"bessel_eval needs x > 0, got x={x}")
    if scaled:
        iv = kernel.besseli_scaled(n, x)
        kv = kernel.besselk_scaled(n, x)
        if n == 0:
            ip = kernel.besseli_scaled(1, x)
            kp = -kernel.besselk_scaled(1, x)
        else:
            ip = kernel.besseli_scaled(n - 1, x) - (n / x) * iv
            kp = -kernel.besselk_scaled(n - 1, x) - (n / x) * kv
    else:
        iv = kernel.besseli(n, x)
        kv = kernel.besselk(n, x)
        ip, kp = kernel.bessel_derivs(n, x)
    return BesselEval(order=n, argument=float(x), value_i=iv, value_k=kv,
                      deriv_i=ip, deriv_k=kp, scaled=scaled)
