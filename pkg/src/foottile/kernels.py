"""Backend selection for the numerical kernels.

The compiled Cython module is used when it was built; otherwise the
pure-Python fallback is imported.  Set ``FOOTTILE_PURE_PYTHON=1`` to force
the fallback, e.g. for debugging or for the benchmark comparison.
"""
import os

from . import _pykernels

BACKEND = "python"
if not os.environ.get("FOOTTILE_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

invert_cubic = _impl.invert_cubic
hop_integrate = _impl.hop_integrate


def backends():
    """Return the available kernel modules keyed by name."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
