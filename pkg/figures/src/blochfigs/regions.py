"""Closed-form parameter-space geometry for the region figures.

These are inequalities on model parameters, not dynamics: the cubic
population models keep their rates nonnegative when |t - 2a| <= sqrt(8a)
with 0 < a < 2, the biased variant additionally needs |b| <= 2a, and its
fold sits on the critical-bias curve b_c(t) below.
"""

from __future__ import annotations

import numpy as np


def critical_field(t):
    """Critical bias b_c(t) = 2 (|t|/3)^(3/2) where the fold happens.

    Accepts scalars or arrays; meaningful as a fold location for t < 0
    (for t >= 0 the cubic is monotone and the curve is just its mirror).
    """
    t = np.asarray(t, dtype=float)
    out = 2.0 * (np.abs(t) / 3.0) ** 1.5
    return float(out) if out.ndim == 0 else out


def cubic_band(alpha: float) -> tuple[float, float]:
    """The interval of t with nonnegative rates at curvature alpha."""
    half = np.sqrt(8.0 * alpha)
    return 2.0 * alpha - half, 2.0 * alpha + half


def inside_pitchfork(alpha, t):
    """Boolean mask for the admissible (alpha, t) region of the cubic model."""
    alpha = np.asarray(alpha, dtype=float)
    t = np.asarray(t, dtype=float)
    ok = (alpha > 0.0) & (alpha < 2.0)
    ok &= np.abs(t - 2.0 * alpha) <= np.sqrt(8.0 * np.clip(alpha, 0.0, None))
    return bool(ok) if ok.ndim == 0 else ok


def inside_saddle_node(alpha, t, b):
    """Boolean mask for the admissible (t, b) region of the biased model."""
    b = np.asarray(b, dtype=float)
    ok = inside_pitchfork(alpha, t) & (np.abs(b) <= 2.0 * np.asarray(alpha, dtype=float))
    return bool(ok) if ok.ndim == 0 else ok
