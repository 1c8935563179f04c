"""Extreme cycle means of edge weights (Karp's minimum mean cycle)."""
from __future__ import annotations

import numpy as np


def min_cycle_mean(adjacency, weights) -> float:
    """Minimum over all cycles of the mean edge weight.

    Karp's theorem with a virtual source joined to every vertex: with
    ``D_t(v)`` the least weight of a length-``t`` walk ending at ``v``,

        min mean = min_v max_{0 <= t < n} (D_n(v) - D_t(v)) / (n - t).

    Works for graphs that are not strongly connected as long as some
    cycle exists (every vertex of an SFT has a successor, so one does).
    """
    a = np.asarray(adjacency).astype(bool)
    w = np.where(a, np.asarray(weights, dtype=float), np.inf)
    n = a.shape[0]
    D = np.full((n + 1, n), np.inf)
    D[0] = 0.0
    for t in range(1, n + 1):
        # D[t, v] = min_u D[t-1, u] + w[u, v]
        D[t] = np.min(D[t - 1][:, None] + w, axis=0)
    best = np.inf
    for v in range(n):
        if not np.isfinite(D[n, v]):
            continue
        worst = -np.inf
        for t in range(n):
            if np.isfinite(D[t, v]):
                worst = max(worst, (D[n, v] - D[t, v]) / (n - t))
        best = min(best, worst)
    if not np.isfinite(best):
        raise ValueError("graph has no cycle")
    return float(best)


def max_cycle_mean(adjacency, weights) -> float:
    return -min_cycle_mean(adjacency, -np.asarray(weights, dtype=float))


def cycle_mean_range(adjacency, weights) -> tuple[float, float]:
    return min_cycle_mean(adjacency, weights), max_cycle_mean(adjacency, weights)
