"""Kernel backend selection: compiled extension when available, numpy fallback.

Set DPG_PURE_PYTHON=1 to force the fallback.  Callers can also pass an
explicit backend name ("cython" or "python") to the functions that take one,
which is how the parity tests and benchmarks compare the two.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _speedups
except ImportError:
    _speedups = None

_BACKENDS = {"python": _kernels_py}
if _speedups is not None:
    _BACKENDS["cython"] = _speedups


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def default_backend_name() -> str:
    if os.environ.get("DPG_PURE_PYTHON"):
        return "python"
    return "cython" if "cython" in _BACKENDS else "python"


def get_backend(name: str | None = None):
    """Resolve a backend module by name (None means the default)."""
    if name is None:
        name = default_backend_name()
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; available: {', '.join(available_backends())}"
        ) from None
