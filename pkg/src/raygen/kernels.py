"""Backend selection for the hot kernels.

The compiled ``_core`` extension is used when it imports; otherwise, or when
``RAYGEN_PURE_PYTHON=1`` is set, the numpy fallback in ``_core_py`` is used.
"""
from __future__ import annotations

import os

from . import _core_py

_FORCE_PURE = os.environ.get("RAYGEN_PURE_PYTHON", "") not in ("", "0")

if _FORCE_PURE:
    _impl = _core_py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _core_py
        BACKEND = "python"

_REDUCE_SAFE = 1 << 30


def add_flat(a, b, radices):
    return _impl.add_flat(a, b, radices)


def closure_extend(elems, n, mask, g, radices):
    return _impl.closure_extend(elems, n, mask, g, radices)


def greedy_generate(candidates, target_mask, target_order, radices):
    return _impl.greedy_generate(candidates, target_mask, target_order, radices)


def reduce_form(a: int, b: int, c: int) -> tuple[int, int, int]:
    if max(abs(a), abs(b), abs(c)) < _REDUCE_SAFE:
        return _impl.reduce_form(a, b, c)
    return _core_py.reduce_form(a, b, c)


def backend_module(name: str):
    """The kernel module for ``name`` ('python' or 'cython'); for tests and benchmarks."""
    if name == "python":
        return _core_py
    from . import _core  # type: ignore[attr-defined]

    return _core
