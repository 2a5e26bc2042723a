"""Dominance kernels with a compiled fast path.

The Cython extension ``_ckernels`` is used when it was built and importable;
otherwise the pure-Python module is used. Set ``KIMPL_PURE_PYTHON=1`` to force
the fallback. Inputs whose magnitudes may not fit in int64 always take the
pure-Python path, which works on unbounded integers.
"""
import os

from . import _pykernels

BACKEND = "python"
_fast = None
if not os.environ.get("KIMPL_PURE_PYTHON"):
    try:
        from . import _ckernels as _fast
        BACKEND = "cython"
    except ImportError:  # extension not built
        _fast = None

_INT64_SAFE = 2**62


def _max_abs(rows):
    return max((abs(int(v)) for r in rows for v in r), default=0)


def nondominated(mat):
    """Indices of rows not weakly dominated by any other row."""
    if _fast is not None and _max_abs(mat) < _INT64_SAFE:
        return _fast.nondominated(mat)
    return _pykernels.nondominated(mat)


def dominates_rows(ra, rb):
    if _fast is not None and _max_abs([ra, rb]) < _INT64_SAFE:
        return bool(_fast.dominates_rows(ra, rb))
    return _pykernels.dominates_rows(ra, rb)


def feasible_cost_vectors(base, cost_cells, free_cells, grid, target):
    """See :func:`kimpl.kernels._pykernels.feasible_cost_vectors`."""
    if _fast is not None and _max_abs(base) + _max_abs([grid]) < _INT64_SAFE:
        return _fast.feasible_cost_vectors(base, cost_cells, free_cells, grid, target)
    return _pykernels.feasible_cost_vectors(base, cost_cells, free_cells, grid, target)
