"""One-dimensional maximisation helpers: grid scans and golden-section refinement."""
from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, a: float, b: float, tol: float = 1e-10, max_iter: int = 500):
    """Maximise a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``.

    Stops once the bracket is narrower than ``tol``.  Note the location of
    a smooth maximum is only determined to about ``sqrt(eps)`` relative
    by function values alone; callers needing more polish with a root
    finder on the derivative.
    """
    if b < a:
        a, b = b, a
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        # ties move toward the smaller abscissa
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    fx = f(x)
    for xc, fc in ((x1, f1), (x2, f2)):
        if fc > fx:
            x, fx = xc, fc
    return x, fx


def grid_local_maxima(values: np.ndarray, plateau_tol: float = 1e-14) -> list[int]:
    """Indices of interior strict local maxima of a sampled curve.

    Runs of equal values (within ``plateau_tol``) are merged into one
    candidate located at the middle of the run.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    out = []
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and abs(v[j + 1] - v[i]) < plateau_tol:
            j += 1
        if j >= n - 1:
            break
        if v[i] > v[i - 1] + plateau_tol and v[i] > v[j + 1] + plateau_tol:
            out.append((i + j) // 2)
        i = j + 1
    return out
