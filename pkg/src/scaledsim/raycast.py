"""Raycast backend selection: compiled kernel when built, pure Python otherwise.

Set SCALEDSIM_PURE_PY=1 to force the fallback (used by the benchmark and the
backend-parity tests).
"""
from __future__ import annotations

import os

if os.environ.get("SCALEDSIM_PURE_PY"):
    from . import _raycast_py as _impl
else:
    try:
        from . import _raycast_c as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _raycast_py as _impl

BACKEND: str = _impl.BACKEND
cast_ray = _impl.cast_ray
cast_rays = _impl.cast_rays
