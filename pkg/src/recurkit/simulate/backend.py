"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python
fallback implements the identical algorithm (same streams, same draws).
Set ``RECURKIT_BACKEND=python`` or ``=compiled`` to force a choice.
"""
from __future__ import annotations

import os

from . import _kernel_py

_forced = os.environ.get("RECURKIT_BACKEND", "").strip().lower()

_compiled = None
if _forced != "python":
    try:
        from . import _kernel as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None
        if _forced == "compiled":
            raise ImportError(
                "RECURKIT_BACKEND=compiled but the extension is not built; "
                "reinstall with a C compiler available")

BACKEND = "compiled" if _compiled is not None else "python"


def kernels(backend: str | None = None):
    """Return the kernel module for `backend` (default: the selected one)."""
    if backend in (None, "", BACKEND):
        return _kernel_py if _compiled is None else _compiled
    if backend == "python":
        return _kernel_py
    if backend == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernel not available")
        return _compiled
    raise ValueError(f"unknown backend {backend!r}")
