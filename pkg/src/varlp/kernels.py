"""Backend selection for the fold kernels.

The compiled extension is used when it was built; otherwise the pure-Python
twin is loaded. Set ``VARLP_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from . import _kernels_py

_compiled = None
if not os.environ.get("VARLP_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def compiled_available():
    return _compiled is not None


def _vec(a):
    return np.ascontiguousarray(a, dtype=np.float64)


class _Backend:
    """Uniform wrapper: accepts array-likes, returns floats / ndarrays."""

    def __init__(self, impl, compiled):
        self.impl = impl
        self.compiled = compiled
        self.name = "cython" if compiled else "python"

    def boxplus(self, t, s, p):
        return self.impl.boxplus(float(t), float(s), float(p))

    def fold(self, mags, exps, acc=0.0):
        if self.compiled:
            return self.impl.fold(_vec(mags), _vec(exps), float(acc))
        return self.impl.fold(_vec(mags).tolist(), _vec(exps).tolist(), float(acc))

    def fold_running(self, mags, exps, acc=0.0):
        if self.compiled:
            return self.impl.fold_running(_vec(mags), _vec(exps), float(acc))
        return np.array(
            self.impl.fold_running(_vec(mags).tolist(), _vec(exps).tolist(), float(acc)),
            dtype=np.float64,
        )

    def fold_rows(self, mags, exps):
        mags = np.ascontiguousarray(mags, dtype=np.float64)
        exps = np.ascontiguousarray(np.broadcast_to(exps, mags.shape), dtype=np.float64)
        if self.compiled:
            return self.impl.fold_rows(mags, exps)
        return np.array(self.impl.fold_rows(mags.tolist(), exps.tolist()), dtype=np.float64)

    def first_admissible(self, inv_p, inv_q, bound, start=0):
        if self.compiled:
            return int(self.impl.first_admissible(_vec(inv_p), float(inv_q), float(bound), int(start)))
        return self.impl.first_admissible(_vec(inv_p).tolist(), float(inv_q), float(bound), int(start))


python_backend = _Backend(_kernels_py, compiled=False)
compiled_backend = _Backend(_compiled, compiled=True) if _compiled is not None else None
active = compiled_backend or python_backend

boxplus = active.boxplus
fold = active.fold
fold_running = active.fold_running
fold_rows = active.fold_rows
first_admissible = active.first_admissible
