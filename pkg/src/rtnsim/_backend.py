"""Kernel selection.

The compiled extension is used when importable; setting the environment
variable ``RTNSIM_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _fallback
from .errors import ParameterError

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("RTNSIM_PURE_PYTHON"):
    DEFAULT = "cython"
else:
    DEFAULT = "python"


def available():
    return ["cython", "python"] if _compiled is not None else ["python"]


def get(name=None):
    """Kernel module for ``name`` (``"cython"``, ``"python"`` or ``None`` for default)."""
    name = DEFAULT if name is None else name
    if name == "python":
        return _fallback
    if name == "cython":
        if _compiled is None:
            raise ParameterError("compiled kernels are not built; reinstall with Cython available")
        return _compiled
    raise ParameterError(f"unknown backend {name!r}")
