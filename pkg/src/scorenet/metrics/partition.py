"""Agreement between two partitions of the same node set."""

from __future__ import annotations

import numpy as np

__all__ = ["contingency", "adjusted_rand_index", "variation_of_information"]


def _labels(p) -> np.ndarray:
    return np.asarray(getattr(p, "labels", p)).ravel()


def contingency(p, q) -> np.ndarray:
    """Counts of nodes per (community in p, community in q)."""
    a, b = _labels(p), _labels(q)
    if len(a) != len(b):
        raise ValueError(f"partitions differ in length: {len(a)} vs {len(b)}")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max(initial=-1) + 1, ib.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (ia.ravel(), ib.ravel()), 1)
    return table


def _pairs(x):
    x = np.asarray(x, dtype=np.float64)
    return (x * (x - 1) / 2).sum()


def adjusted_rand_index(p, q) -> float:
    """
    Hubert-Arabie adjusted Rand index.

    Identical partitions (up to renaming) give 1.0, including the degenerate
    cases where the chance-corrected denominator vanishes.
    """
    table = contingency(p, q)
    n = table.sum()
    if n < 2:
        return 1.0
    index = _pairs(table)
    rows, cols = _pairs(table.sum(axis=1)), _pairs(table.sum(axis=0))
    expected = rows * cols / _pairs(n)
    top = 0.5 * (rows + cols)
    if top == expected:
        return 1.0
    return float((index - expected) / (top - expected))


def variation_of_information(p, q) -> float:
    """``H(p) + H(q) - 2 I(p; q)`` in nats."""
    table = contingency(p, q).astype(np.float64)
    n = table.sum()
    if n == 0:
        return 0.0
    r = table / n
    pa, pb = r.sum(axis=1), r.sum(axis=0)
    nz = r > 0
    # sum r log(r^2 / (pa pb)) = -(H(p) + H(q) - 2 I)
    ratio = r[nz] ** 2 / np.outer(pa, pb)[nz]
    vi = -float((r[nz] * np.log(ratio)).sum())
    return max(vi, 0.0)
