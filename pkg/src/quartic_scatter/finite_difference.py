"""Finite-difference weights on arbitrary stencils (Fornberg's recursion)."""

from __future__ import annotations

import numpy as np


def fd_weights(x0: float, nodes, order: int) -> np.ndarray:
    """Weights w with f^(order)(x0) ~ sum w_j f(nodes_j)."""
    nodes = np.asarray(nodes, dtype=float)
    n = len(nodes)
    if order >= n:
        raise ValueError("stencil too small for the requested derivative")
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, nodes[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, nodes[i] - x0
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def derivative(f, x0: float, order: int, h: float, points: int = 9, side: str = "central"):
    """order-th derivative of f at x0 from `points` samples spaced h apart.

    side='central' uses a symmetric stencil; 'left'/'right' keep every node on
    that side of x0 (x0 included), for functions with a jump at x0.
    """
    if side == "central":
        half = points // 2
        offsets = np.arange(-half, half + 1)
    elif side == "right":
        offsets = np.arange(points)
    elif side == "left":
        offsets = -np.arange(points)[::-1]
    else:
        raise ValueError(f"unknown stencil side {side!r}")
    nodes = x0 + h * offsets
    w = fd_weights(x0, nodes, order)
    vals = np.array([f(x) for x in nodes])
    return np.tensordot(w, vals, axes=1)
