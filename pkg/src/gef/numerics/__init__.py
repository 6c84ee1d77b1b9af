"""Backend selection for the hot kernels.

The compiled extension is preferred when available; the numpy fallback gives
identical results.  Set ``GEF_BACKEND=python`` to force the fallback or
``GEF_BACKEND=cython`` to require the extension (import error if missing).
"""

import os

from . import pykernels

_requested = os.environ.get("GEF_BACKEND", "auto").strip().lower()

if _requested in ("python", "pure"):
    _impl = pykernels
elif _requested in ("cython", "compiled"):
    from . import cykernels as _impl
elif _requested in ("auto", ""):
    try:
        from . import cykernels as _impl
    except ImportError:
        _impl = pykernels
else:
    raise RuntimeError(f"unknown GEF_BACKEND value: {_requested!r}")

BACKEND = _impl.BACKEND
frac_conv = _impl.frac_conv
rk4_companion = _impl.rk4_companion

__all__ = ["BACKEND", "frac_conv", "rk4_companion", "pykernels"]
