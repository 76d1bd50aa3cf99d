"""Backend selection for the Stein-Laplace kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback.  Set ``PARETOGOF_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("PARETOGOF_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

ds1_batch = _impl.ds1_batch
ds2_batch = _impl.ds2_batch
ds3_batch = _impl.ds3_batch
departure_batch = _impl.departure_batch


def backends():
    """Mapping of available backend name -> kernel module (for benchmarks and tests)."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
