"""Kernel backend selection.

The hot loops (Hilbert codec, north-west sweep) exist twice: a Cython
extension (``_core``) and a pure-Python fallback (``_fallback``) with
identical semantics.  The compiled one is picked at import when present;
``HILBERT_OT_BACKEND=fallback`` forces the pure path, e.g. for
benchmarking the two against each other.
"""

import os

from ..errors import ParameterError
from . import _fallback

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

HAVE_COMPILED = _core is not None


def available_backends() -> tuple:
    return ("compiled", "fallback") if HAVE_COMPILED else ("fallback",)


def resolve(name=None):
    """Return the kernel module for `name` (None/'auto' picks the best)."""
    if name is None:
        name = os.environ.get("HILBERT_OT_BACKEND", "auto")
    if name == "auto":
        return _core if HAVE_COMPILED else _fallback
    if name == "compiled":
        if not HAVE_COMPILED:
            raise ParameterError("compiled kernel backend is not built")
        return _core
    if name == "fallback":
        return _fallback
    raise ParameterError(f"unknown kernel backend {name!r}")


def active_backend_name() -> str:
    return resolve().BACKEND_NAME
