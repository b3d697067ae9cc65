"""Kernel backend selection: compiled extension if available, numpy fallback.

``HFORGE_KERNEL=c`` forces the compiled extension (ImportError if missing),
``HFORGE_KERNEL=py`` forces the fallback. Default is auto.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_requested = os.environ.get("HFORGE_KERNEL", "auto").strip().lower()

if _requested in ("auto", "", "c"):
    try:
        from . import _speedups as _impl

        BACKEND = "c"
    except ImportError:
        if _requested == "c":
            raise
        _impl = _kernels_py
        BACKEND = "py"
elif _requested == "py":
    _impl = _kernels_py
    BACKEND = "py"
else:
    raise ValueError(f"unknown HFORGE_KERNEL backend {_requested!r}")

# Guard against int64 overflow in the accumulator: |out| is bounded by
# sum|a| * max|b|, so keep that product comfortably below 2^63. The factor-2
# headroom also absorbs float rounding in the guard itself.
_OVERFLOW_LIMIT = 1 << 62


class CoefficientOverflow(OverflowError):
    """Convolution would exceed the checked 64-bit coefficient range."""


def get_impl(backend: str):
    if backend == "c":
        from . import _speedups

        return _speedups
    if backend == "py":
        return _kernels_py
    raise ValueError(f"unknown backend {backend!r}")


def convolve(a: np.ndarray, b: np.ndarray, mul: np.ndarray, impl=None) -> np.ndarray:
    """Group-ring product coefficients: c = a * b over the Cayley table."""
    a_support = np.flatnonzero(a)
    b_support = np.flatnonzero(b)
    out = np.zeros(len(a), dtype=np.int64)
    if len(a_support) and len(b_support):
        # float accumulation cannot wrap; the margin below _OVERFLOW_LIMIT
        # dwarfs its rounding error
        abs_sum = float(np.abs(a[a_support]).sum(dtype=np.float64))
        abs_max = float(np.abs(b[b_support]).max())
        if abs_sum * abs_max >= float(_OVERFLOW_LIMIT):
            raise CoefficientOverflow(
                f"coefficient bound near {abs_sum * abs_max:.3g} exceeds the "
                "checked 64-bit range"
            )
        (impl or _impl).convolve_into(out, a, b, mul, a_support, b_support)
    return out


def pushforward(a: np.ndarray, images: np.ndarray, size: int, impl=None) -> np.ndarray:
    """out[images[g]] += a[g]: transport coefficients along an element map."""
    out = np.zeros(size, dtype=np.int64)
    support = np.flatnonzero(a)
    if len(support):
        (impl or _impl).scatter_map(out, a, images, support)
    return out
