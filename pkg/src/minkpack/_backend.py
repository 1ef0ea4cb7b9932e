"""Kernel backend selection: compiled extension when available, else numpy.

Set MINKPACK_FORCE_PYTHON=1 to skip the compiled kernels (used by the
benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

if os.environ.get("MINKPACK_FORCE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND_NAME
