"""Hot-kernel dispatch.

The numba backend is used when available; set ``DUALSHADOW_BACKEND=numpy``
to force the pure-numpy fallback (or ``numba`` to fail loudly if numba is
missing).  Selection happens once at import time.
"""

import os

from . import numpy_backend

_choice = os.environ.get("DUALSHADOW_BACKEND", "auto").lower()

if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(f"DUALSHADOW_BACKEND must be auto, numba or numpy, got {_choice!r}")

if _choice == "numpy":
    _impl = numpy_backend
else:
    try:
        from . import numba_backend as _impl
    except ImportError:
        if _choice == "numba":
            raise
        _impl = numpy_backend

conv2d_reflect = _impl.conv2d_reflect
conv2d_nchw = _impl.conv2d_nchw
bilinear_resize = _impl.bilinear_resize
sample_entropy = _impl.sample_entropy
entropy_sweep = _impl.entropy_sweep


def backend_name():
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return _impl.NAME
