"""Backend selection for the hot kernels.

Two interchangeable implementations exist: a compiled Cython core and a
NumPy one (cross-checked in the test suite).  They win in different places,
so the default picks per kernel what benchmarks faster on this toolchain:

* covariance matrix assembly: compiled core (fused loops; the NumPy path
  pays for masking and temporaries),
* quadrature integrands: NumPy (its SIMD-vectorised transcendental loops
  beat scalar libm calls in a streaming kernel).

Set ``LAMPERTI_LAB_BACKEND=c`` or ``=py`` to force one implementation for
everything; forcing ``c`` raises if the extension was not built.
"""

import os

from . import _numpycore

_choice = os.environ.get("LAMPERTI_LAB_BACKEND", "").strip().lower()
if _choice not in ("", "c", "py"):
    raise RuntimeError(
        f"LAMPERTI_LAB_BACKEND must be 'c' or 'py', got {_choice!r}")

_fast = None
if _choice != "py":
    try:
        from . import _fastcore as _fast
    except ImportError:
        if _choice == "c":
            raise
        _fast = None

if _choice == "c":
    _matrix_mod = _quad_mod = _fast
elif _choice == "py" or _fast is None:
    _matrix_mod = _quad_mod = _numpycore
else:
    _matrix_mod, _quad_mod = _fast, _numpycore

MATRIX_BACKEND = _matrix_mod.NAME
QUAD_BACKEND = _quad_mod.NAME
BACKEND = (MATRIX_BACKEND if MATRIX_BACKEND == QUAD_BACKEND
           else f"{MATRIX_BACKEND}+{QUAD_BACKEND}")

sub_cov_matrix = _matrix_mod.sub_cov_matrix
bi_cov_matrix = _matrix_mod.bi_cov_matrix
langevin_integrand_sub = _quad_mod.langevin_integrand_sub
langevin_integrand_bi = _quad_mod.langevin_integrand_bi


def available_backends():
    """Names of importable backends ('cython' first when built)."""
    names = []
    try:
        from . import _fastcore
        names.append(_fastcore.NAME)
    except ImportError:
        pass
    names.append(_numpycore.NAME)
    return names


def get_backend(name):
    """Fetch a backend module by name ('cython' or 'numpy')."""
    if name == "numpy":
        return _numpycore
    if name == "cython":
        from . import _fastcore
        return _fastcore
    raise ValueError(f"unknown backend {name!r}")
