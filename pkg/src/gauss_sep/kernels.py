"""Kernel dispatch: the compiled ``_core`` extension when importable, else
the numpy fallback. Set ``GAUSS_SEP_PURE_PYTHON=1`` to force the fallback."""

import os

import numpy as np

from . import _core_py

if os.environ.get("GAUSS_SEP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _core_py
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _core_py

BACKEND = "cython" if _impl is not _core_py else "python"


def gaussian_fock_matrix(n, m, N):
    return _impl.gaussian_fock_matrix(float(n), complex(m), int(N))


def classify_grid(n, mabs, eps):
    n = np.ascontiguousarray(n, dtype=np.float64)
    mabs = np.ascontiguousarray(mabs, dtype=np.float64)
    return _impl.classify_grid(n, mabs, float(eps))
