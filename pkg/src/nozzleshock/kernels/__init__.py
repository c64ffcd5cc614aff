"""Kernel dispatch.

The backend is picked once at import from ``NOZZLESHOCK_BACKEND``
(``numba`` or ``numpy``).  ``numba`` is the default and silently falls
back to ``numpy`` when numba cannot be imported.
"""
import os

from . import _numpy

_requested = os.environ.get("NOZZLESHOCK_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"NOZZLESHOCK_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numba":
    try:
        from . import _numba as _impl
    except ImportError:  # pragma: no cover - numba is a hard dependency
        _impl = _numpy
else:
    _impl = _numpy

BACKEND = _impl.NAME

periodic_cubic = _impl.periodic_cubic
uniform_cubic = _impl.uniform_cubic
bicubic = _impl.bicubic
bicubic_scalar = _impl.bicubic_scalar
march_linear = _impl.march_linear
trace_to_curve = _impl.trace_to_curve
march_supersonic = _impl.march_supersonic
rk4_branch = _impl.rk4_branch
hll_step = _impl.hll_step
shock_rhs = _impl.shock_rhs
shock_flow = _impl.shock_flow
ibvp_step = _impl.ibvp_step


def implementation(name):
    """Return the kernel module for ``name`` regardless of the env flag."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        from . import _numba
        return _numba
    raise ValueError(name)
