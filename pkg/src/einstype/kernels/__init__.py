"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``EINSTYPE_NUMBA`` is not set to ``0``.  Both paths implement the
same contracts and are cross-checked in the test suite.
"""

import os

from . import _numpy

__all__ = ["curvature_jet", "curvature_low", "tridiag_min_eig", "BACKEND", "backend"]


def _want_numba() -> bool:
    return os.environ.get("EINSTYPE_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


if _want_numba():
    try:
        from . import _numba as _impl
        BACKEND = "numba"
    except ImportError:  # numba missing or broken: keep going on numpy
        _impl = _numpy
        BACKEND = "numpy"
else:
    _impl = _numpy
    BACKEND = "numpy"

curvature_jet = _impl.curvature_jet
curvature_low = _impl.curvature_low
tridiag_min_eig = _impl.tridiag_min_eig


def backend(name: str):
    """Module implementing the kernels for ``name`` ("numpy" or "numba")."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba
        return _numba
    raise ValueError(f"unknown backend {name!r}")
