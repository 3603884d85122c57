"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is a drop-in
fallback so the package works from a source tree without building.  Both
expose the same scalar/grid functions and agree to a few ulp (see
``tests/test_backend.py`` and ``benchmarks/bench_bessel.py``).
"""

try:
    from . import _kernel as kernel
except ImportError:  # pragma: no cover - exercised when ext is absent
    from . import _kernel_py as kernel

BACKEND = kernel.BACKEND


def available_backends():
    """Names of importable kernel backends, compiled first."""
    names = []
    try:
        from . import _kernel  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names


def get_kernel(name):
    """Return a specific kernel module by backend name."""
    if name == "cython":
        from . import _kernel

        return _kernel
    if name == "python":
        from . import _kernel_py

        return _kernel_py
    raise ValueError(f"unknown backend {name!r}")
