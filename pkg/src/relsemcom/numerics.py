"""Principal-branch Lambert W on the nonnegative reals."""

from __future__ import annotations

import math

import numpy as np

MAX_ITER = 50


def lambert_w0(x: float) -> float:
    """Solve ``w * exp(w) = x`` for ``w >= 0``.

    Halley iterations started from ``log1p(x)``; converges in a handful of
    steps over the whole range used by the rate allocation.
    """
    x = float(x)
    if not x >= 0.0:
        raise ValueError(f"lambert_w0 is defined here only for x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    w = math.log1p(x)
    for _ in range(MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= 1e-15 * (1.0 + abs(w)):
            break
    return w


def lambert_w0_array(x) -> np.ndarray:
    """Vectorised :func:`lambert_w0` with the same iteration and stopping rule."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 0.0)):
        raise ValueError("lambert_w0_array is defined here only for x >= 0")
    w = np.log1p(x)
    active = (x > 0.0) & np.isfinite(x)
    for _ in range(MAX_ITER):
        if not active.any():
            break
        ew = np.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        dw = np.where(active, f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1)), 0.0)
        w = w - dw
        active &= np.abs(dw) > 1e-15 * (1.0 + np.abs(w))
    return w
