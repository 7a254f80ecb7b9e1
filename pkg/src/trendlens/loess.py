"""Locally weighted polynomial regression (loess) with tricube weights.

Each query point gets its own weighted least-squares polynomial fit over the
span_points nearest data points. Neighborhood weights are tricube in the
scaled distance; optional per-point robustness weights multiply in. Queries
outside the data range reuse the nearest window, so the smoother is defined
everywhere.
"""

from __future__ import annotations

import numpy as np


def tricube(u: np.ndarray) -> np.ndarray:
    """Tricube kernel (1 - u^3)^3 on [0, 1), zero beyond."""
    u = np.abs(u)
    w = np.zeros_like(u)
    inside = u < 1.0
    w[inside] = (1.0 - u[inside] ** 3) ** 3
    return w


def loess(xs, ys, at, span_points: int, degree: int, weights=None) -> np.ndarray:
    """Fit y(x) locally and evaluate at the query points.

    Args:
        xs: strictly increasing sample positions.
        ys: sample values, same length as xs.
        at: query positions (any order, may lie outside [xs[0], xs[-1]]).
        span_points: number of nearest samples in each local fit.
        degree: local polynomial degree, 0, 1 or 2.
        weights: optional nonnegative robustness weights per sample.

    Returns:
        Fitted values at the query points.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    at = np.atleast_1d(np.asarray(at, dtype=float))
    n = len(xs)
    if n == 0 or len(ys) != n:
        raise ValueError("xs and ys must be equal-length and non-empty")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be strictly increasing")
    if degree not in (0, 1, 2):
        raise ValueError("degree must be 0, 1 or 2")
    if span_points < degree + 1:
        raise ValueError("span_points must be at least degree + 1")
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if len(weights) != n or np.any(weights < 0):
            raise ValueError("weights must be nonnegative, one per sample")

    q = min(span_points, n)
    out = np.empty(len(at))
    for j, x0 in enumerate(at):
        dist = np.abs(xs - x0)
        if q < n:
            idx = np.argpartition(dist, q - 1)[:q]
        else:
            idx = np.arange(n)
        d = dist[idx]
        h = d.max()
        if span_points > n:
            # Cleveland's rule for spans beyond the data: inflate the
            # bandwidth so the kernel flattens toward a plain weighted mean.
            h *= span_points / n
        w = tricube(d / h) if h > 0 else np.ones_like(d)
        if weights is not None:
            combined = w * weights[idx]
        else:
            combined = w
        total = combined.sum()
        if total <= 0:
            # All robustness weight vanished in this window; retreat to the
            # neighborhood weights alone, then to a plain mean.
            combined = w
            total = combined.sum()
        if total <= 0:
            out[j] = ys[idx].mean()
            continue
        out[j] = _weighted_poly_at(xs[idx] - x0, ys[idx], combined, degree)
    return out


def _weighted_poly_at(dx, yv, w, degree):
    """Weighted LSQ polynomial in dx evaluated at dx=0 (the intercept)."""
    if degree == 0:
        return float(np.dot(w, yv) / w.sum())
    cols = [np.ones_like(dx), dx]
    if degree == 2:
        cols.append(dx * dx)
    design = np.column_stack(cols)
    sw = np.sqrt(w)
    beta, *_ = np.linalg.lstsq(design * sw[:, None], yv * sw, rcond=None)
    return float(beta[0])
