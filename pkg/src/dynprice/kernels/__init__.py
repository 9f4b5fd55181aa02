"""Hot numerical kernels with two interchangeable backends.

The numba backend is used when numba imports cleanly, unless the environment
variable ``DYNPRICE_DISABLE_NUMBA`` is set to a truthy value, in which case
the vectorised numpy backend is used. Both expose:

``bellman_step(grid, next_row, W, wts, cand, q1, q2, refine_iters)``
    One backward-induction sweep: maximise the stage objective at each node.
``olfc_solve_batch(s, W, wts, starts, q1, q2, C, lo, hi, tol, max_sweeps, n_scan)``
    Multistart coordinate ascent on the frozen sample-average objective.
"""

import importlib
import os

from . import _numpy

_FLAG = os.environ.get("DYNPRICE_DISABLE_NUMBA", "").strip().lower()
_disabled = _FLAG not in ("", "0", "false", "no")

_numba = None
if not _disabled:
    try:
        _numba = importlib.import_module(__name__ + "._numba")
    except ImportError:  # pragma: no cover - numba missing
        _numba = None

BACKEND = "numba" if _numba is not None else "numpy"
_impl = _numba if _numba is not None else _numpy

bellman_step = _impl.bellman_step
olfc_solve_batch = _impl.olfc_solve_batch


def backend(name: str):
    """Return the kernel module for ``name`` ('numba' or 'numpy')."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        return _numba if _numba is not None else importlib.import_module(__name__ + "._numba")
    raise ValueError(f"unknown backend {name!r}")


def set_threads(n: int) -> None:
    """Limit numba's worker pool; a no-op under the numpy backend."""
    if _numba is not None:
        import numba
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
