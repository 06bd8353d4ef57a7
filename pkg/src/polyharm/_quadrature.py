"""Composite Gauss-Legendre rules with geometric grading toward singular ends."""

from __future__ import annotations

import functools

import numpy as np

ORDER = 12
GRADE_RATIO = 0.5
GRADE_LEVELS = 48


@functools.lru_cache(maxsize=8)
def _gauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1) / 2, w / 2


def panel_edges(lo, hi, width, grade_lo=False, grade_hi=False):
    """Panel boundaries on ``[lo, hi]``: uniform panels of at most ``width``,
    with the end panels split geometrically toward graded endpoints."""
    if hi <= lo:
        return np.array([lo, hi])
    count = max(1, int(np.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, count + 1)
    first = edges[1] - edges[0]
    levels = GRADE_RATIO ** np.arange(1, GRADE_LEVELS + 1)
    parts = [edges]
    if grade_lo:
        parts.append(lo + first * levels)
    if grade_hi:
        parts.append(hi - first * levels)
    return np.unique(np.concatenate(parts))


def rule(edges, order=ORDER):
    """Nodes and weights of the composite rule over consecutive ``edges``."""
    x, w = _gauss(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (a + (b - a) * x[None, :]).ravel()
    weights = ((b - a) * w[None, :]).ravel()
    return nodes, weights


def piecewise_rule(breaks, width, singular=(), order=ORDER):
    """Rule over ``[breaks[0], breaks[-1]]`` honouring interior break points.

    Every sub-interval between consecutive ``breaks`` gets uniform panels of
    at most ``width``; endpoints listed in ``singular`` are graded.
    """
    breaks = np.unique(np.asarray(breaks, dtype=float))
    sing = np.asarray(list(singular), dtype=float)
    pieces = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi - lo <= 0:
            continue
        glo = sing.size > 0 and bool(np.any(np.isclose(sing, lo, rtol=0, atol=1e-14 * max(1.0, abs(lo)))))
        ghi = sing.size > 0 and bool(np.any(np.isclose(sing, hi, rtol=0, atol=1e-14 * max(1.0, abs(hi)))))
        pieces.append(rule(panel_edges(lo, hi, width, glo, ghi), order))
    if not pieces:
        return np.zeros(0), np.zeros(0)
    return np.concatenate([p[0] for p in pieces]), np.concatenate([p[1] for p in pieces])
