"""Kernel backend selection.

The compiled extension (``cmjlab._kernels``) is preferred; the pure-Python
twin (``cmjlab._kernels_py``) is selected when the extension is missing or
when ``CMJLAB_PURE_PYTHON`` is set to a non-empty value other than ``0``.
Both expose the same functions and produce bit-identical results for the
same seed; they differ only in speed (see ``benchmarks/bench_backends.py``).
"""
from __future__ import annotations

import os

_force_py = os.environ.get("CMJLAB_PURE_PYTHON", "").strip() not in ("", "0")

if _force_py:
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
