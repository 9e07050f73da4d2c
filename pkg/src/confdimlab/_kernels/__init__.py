"""Hot numeric kernels with a selectable backend.

The backend is chosen once at import time from the ``CONFDIMLAB_BACKEND``
environment variable: ``numba`` (default when numba imports) or
``numpy``.  Both backends expose the same functions; ``get_backend``
returns either module explicitly, which is how the tests cross-check
them.
"""

import os

from . import _numpy

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

KERNEL_NAMES = (
    "triangle_violation",
    "pair_ratio_max",
    "mcshane",
    "vertex_dijkstra",
    "dual_sweep",
    "curve_lengths",
)


def get_backend(name=None):
    name = (name or os.environ.get("CONFDIMLAB_BACKEND", "numba")).lower()
    if name == "numba" and _numba is not None:
        return _numba
    if name in ("numpy", "numba"):
        return _numpy
    raise ValueError(f"unknown kernel backend {name!r}")


_active = get_backend()
BACKEND = "numba" if _active is _numba else "numpy"

triangle_violation = _active.triangle_violation
pair_ratio_max = _active.pair_ratio_max
mcshane = _active.mcshane
vertex_dijkstra = _active.vertex_dijkstra
dual_sweep = _active.dual_sweep
curve_lengths = _active.curve_lengths
