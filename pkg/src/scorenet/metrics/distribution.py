"""Transitivity and inequality / tail statistics of degree-like counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import Graph, GraphError

__all__ = [
    "transitivity",
    "gini",
    "lorenz_curve",
    "top_share",
    "ccdf",
    "degree_ccdf",
    "TailFit",
    "powerlaw_tail_slope",
]


def transitivity(g: Graph) -> float:
    """Three times the triangle count over the number of connected triples."""
    if g.directed:
        raise GraphError("transitivity is defined here for undirected graphs")
    a = g.adjacency().astype(np.int64)
    deg = np.diff(a.indptr).astype(np.float64)
    triples = float((deg * (deg - 1) / 2).sum())
    if triples == 0:
        return 0.0
    # (A @ A) restricted to edges counts common neighbours of adjacent pairs
    closed = float((a @ a).multiply(a).sum())  # 6 * triangles
    return (closed / 2.0) / triples


def _nonneg(values) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("empty input")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError("values must be finite and non-negative")
    if not np.any(x > 0):
        raise ValueError("values are all zero")
    return x


def gini(values) -> float:
    """Gini coefficient, via the rank-weighted sum of sorted values."""
    x = np.sort(_nonneg(values))
    n = len(x)
    ranks = np.arange(1, n + 1)
    g = 2.0 * (ranks * x).sum() / (n * x.sum()) - (n + 1.0) / n
    # equal values can round to a tiny negative number
    return max(float(g), 0.0)


def lorenz_curve(values) -> list[tuple[float, float]]:
    """
    Points ``(population share, value share)`` from (0, 0) to (1, 1).

    Values are sorted ascending, so the curve is convex and lies on or below
    the diagonal.
    """
    x = np.sort(_nonneg(values))
    n = len(x)
    cum = np.concatenate([[0.0], np.cumsum(x)]) / x.sum()
    cum[-1] = 1.0
    return [(i / n, float(c)) for i, c in enumerate(cum)]


def top_share(values, fraction: float) -> float:
    """Share of the total held by the top ``fraction`` of entries."""
    x = np.sort(_nonneg(values))[::-1]
    k = int(round(fraction * len(x)))
    return float(x[:k].sum() / x.sum())


def ccdf(values) -> list[tuple[float, float]]:
    """
    Empirical ``(d, fraction of entries > d)``.

    Points sit at every distinct value, preceded by ``min - 1`` (fraction 1)
    when the minimum is at least 1, so the fractions strictly decrease.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        return []
    uniq = np.unique(x)
    pts = []
    if uniq[0] >= 1:
        pts.append((float(uniq[0] - 1), 1.0))
    n = len(x)
    sorted_x = np.sort(x)
    for d in uniq:
        above = n - np.searchsorted(sorted_x, d, side="right")
        pts.append((float(d), above / n))
    return pts


def degree_ccdf(g, mode: str = "undirected") -> list[tuple[float, float]]:
    from .centrality import degree_centrality

    return ccdf(degree_centrality(g, mode).scores)


@dataclass(frozen=True)
class TailFit:
    """Least-squares line through a log-log CCDF tail."""

    slope: float
    intercept: float
    rmse: float
    points: int
    flagged: bool


def powerlaw_tail_slope(points, d_min: float, max_rmse: float = 0.1) -> TailFit:
    """
    Slope of ``log(fraction)`` against ``log(d)`` for ``d >= d_min``.

    Diagnostic only. ``flagged`` is set when the residual RMS exceeds
    ``max_rmse``, i.e. the tail is visibly curved on log-log axes.
    """
    pts = np.array([(d, f) for d, f in points if d >= d_min and d > 0 and f > 0],
                   dtype=np.float64)
    if len(pts) < 3:
        raise ValueError(f"need at least 3 tail points with d >= {d_min}, got {len(pts)}")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, intercept = np.polyfit(lx, ly, 1)
    rmse = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return TailFit(float(slope), float(intercept), rmse, len(pts), rmse > max_rmse)
