"""Backend parity: the compiled kernel and the pure-Python fallback
implement the same algorithms and agree to a few ulp."""

import numpy as np
import pytest

from necrobifurc.backend import BACKEND, available_backends, get_kernel


def test_backend_selected():
    assert BACKEND in ("cython", "python")
    names = available_backends()
    assert "python" in names
    assert BACKEND == names[0]


def test_get_kernel_unknown():
    with pytest.raises(ValueError):
        get_kernel("fortran")


@pytest.mark.skipif("cython" not in available_backends(),
                    reason="compiled extension not built")
def test_backends_agree(rng):
    cy = get_kernel("cython")
    py = get_kernel("python")
    ns = rng.integers(0, 40, size=300)
    xs = 10.0 ** rng.uniform(-3, 2.5, size=300)
    for n, x in zip(ns, xs):
        n = int(n)
        x = float(x)
        for fn in ("besseli", "besseli_scaled", "besseli_ln",
                   "besselk", "besselk_scaled", "besselk_ln"):
            a = getattr(cy, fn)(n, x)
            b = getattr(py, fn)(n, x)
            if a == 0.0 or not np.isfinite(a):
                assert a == b
            else:
                # logs are compared with an absolute floor: the log is
                # assembled from O(n log x)-sized intermediates, so a few
                # ulp there is ~1e-13 absolute in the result
                tol = 8e-15 * abs(a) + (1e-13 if fn.endswith("_ln") else 0.0)
                assert abs(a - b) <= tol, (fn, n, x, a, b)
        da = cy.bessel_derivs(n, x)
        db = py.bessel_derivs(n, x)
        for a, b in zip(da, db):
            assert abs(a - b) <= 8e-15 * max(abs(a), abs(b))


@pytest.mark.skipif("cython" not in available_backends(),
                    reason="compiled extension not built")
def test_grid_functions_agree(rng):
    cy = get_kernel("cython")
    py = get_kernel("python")
    xs = np.ascontiguousarray(10.0 ** rng.uniform(-2, 1.5, size=64))
    a = np.empty_like(xs)
    b = np.empty_like(xs)
    cy.besseli_grid(4, xs, a)
    py.besseli_grid(4, xs, b)
    assert np.allclose(a, b, rtol=8e-15, atol=0.0)
    cy.besselk_grid(4, xs, a)
    py.besselk_grid(4, xs, b)
    assert np.allclose(a, b, rtol=8e-15, atol=0.0)
