"""Select the compiled kernels if built, else the pure-Python ones."""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
if not os.environ.get("NISQ_SMTC_PURE"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

closure_matrix = _impl.closure_matrix
earliest_start = _impl.earliest_start

__all__ = ["BACKEND", "closure_matrix", "earliest_start"]
