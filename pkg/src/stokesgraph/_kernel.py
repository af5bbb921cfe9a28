"""Select the trajectory kernel: compiled when available, else pure Python.

Set ``STOKESGRAPH_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _trace_py

if os.environ.get("STOKESGRAPH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _trace_py
    BACKEND = "python"
else:
    try:
        from . import _trace_c as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _trace_py
        BACKEND = "python"

trace_kernel = _impl.trace_kernel
singular_integral = _impl.singular_integral
OPEN, ZERO, INFINITY, UNDERFLOW = _trace_py.OPEN, _trace_py.ZERO, _trace_py.INFINITY, _trace_py.UNDERFLOW
