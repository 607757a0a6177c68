"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise the pure-Python
implementations are used. Both expose ``rk4_hill`` and ``winding_sum``.
"""
from . import _kernels_py as python

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

BACKEND = "compiled" if compiled is not None else "python"
_active = compiled if compiled is not None else python


def rk4_hill(a_nodes, a_mid, h):
    return _active.rk4_hill(a_nodes, a_mid, h)


def winding_sum(fx, fy):
    return _active.winding_sum(fx, fy)
