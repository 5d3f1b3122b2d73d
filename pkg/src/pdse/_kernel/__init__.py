"""Kernel backend selection.

The compiled extension (``pdse._speedups``) implements the same engine as
the pure-Python module; it is preferred when importable.  Set
``PDSE_BACKEND=pure`` or ``PDSE_BACKEND=compiled`` to force a choice.
"""

from __future__ import annotations

import os

from . import pure
from .packed import PackedData
from .rng import Pcg32

__all__ = ["PackedData", "Pcg32", "get_backend", "available_backends"]

_compiled = None
try:
    from .. import _speedups as _compiled  # type: ignore
except ImportError:
    _compiled = None


def available_backends() -> list[str]:
    names = ["pure"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get_backend(name: str | None = None):
    """Return the kernel module to use (honours PDSE_BACKEND)."""
    if name is None:
        name = os.environ.get("PDSE_BACKEND", "")
    if name == "pure":
        return pure
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled backend requested but not built")
        return _compiled
    return _compiled if _compiled is not None else pure
