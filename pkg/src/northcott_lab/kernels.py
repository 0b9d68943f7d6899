"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module is used.  ``NORTHCOTT_LAB_PURE=1`` forces the pure-Python backend.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("NORTHCOTT_LAB_PURE", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND: str = _impl.BACKEND
mulmod = _impl.mulmod
reduce_mod = _impl.reduce_mod
square_candidates = _impl.square_candidates

__all__ = ["BACKEND", "mulmod", "reduce_mod", "square_candidates"]
