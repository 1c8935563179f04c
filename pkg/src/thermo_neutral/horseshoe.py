"""The two-dimensional piecewise-linear horseshoe and its Bernoulli family.

The horseshoe with contraction rates ``eta1, eta2`` is conjugate to the
full 2-shift.  On the first strip the derivative is ``diag(1/eta1, eta2)``
and on the second ``diag(1/eta2, eta1)``, so for a measure giving mass
``p`` to the first strip

    lambda1(p) = -p log eta1 - (1 - p) log eta2
    lambda2(p) =  p log eta2 + (1 - p) log eta1.

Maximisers of ``h + r dim`` are Bernoulli, hence everything reduces to
one-variable calculus in ``p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidSystem
from .search import golden_section_max, grid_local_maxima
from .sft import full_shift
from .surface import TwoPotentialSystem
from .thermo import LocallyConstantPotential

# reference horseshoe whose Bernoulli maximiser splits in two before r = 3
REFERENCE_ETA1 = 0.9703
REFERENCE_ETA2 = REFERENCE_ETA1**117

# endpoints have h = 0 so are never interior maxima
P_EDGE = 1e-9


@dataclass(frozen=True)
class Horseshoe:
    eta1: float
    eta2: float

    def __post_init__(self):
        if not (0 < self.eta1 < 1 and 0 < self.eta2 < 1):
            raise InvalidSystem("eta1 and eta2 must lie in (0, 1)")
        if not self.eta1 + self.eta2 < 1:
            raise InvalidSystem(f"eta1 + eta2 = {self.eta1 + self.eta2} must be < 1")

    @classmethod
    def reference(cls) -> "Horseshoe":
        return cls(REFERENCE_ETA1, REFERENCE_ETA2)

    @property
    def logs(self) -> tuple[float, float]:
        return math.log(self.eta1), math.log(self.eta2)


@dataclass(frozen=True)
class BernoulliStats:
    p: float
    h: float
    lambda1: float
    lambda2: float
    dim: float
    hr: float


def induced_system(hs: Horseshoe) -> TwoPotentialSystem:
    l1, l2 = hs.logs
    return TwoPotentialSystem(
        full_shift(2),
        LocallyConstantPotential([-l1, -l2]),
        LocallyConstantPotential([l2, l1]),
        name=f"horseshoe({hs.eta1:g}, {hs.eta2:g})",
    )


def _entropy(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, -p * np.log(p), 0.0) + np.where(p < 1, -(1 - p) * np.log1p(-p), 0.0)
    return t


def _curves(hs: Horseshoe, p):
    l1, l2 = hs.logs
    p = np.asarray(p, dtype=float)
    h = _entropy(p)
    lam1 = -p * l1 - (1 - p) * l2
    lam2 = p * l2 + (1 - p) * l1
    dim = h * (1.0 / lam1 - 1.0 / lam2)
    return h, lam1, lam2, dim


def hr_curve(hs: Horseshoe, p, r: float):
    """Vectorised ``h^r(p) = h(p) + r dim(p)`` over an array of ``p``."""
    h, _, _, dim = _curves(hs, p)
    return h + r * dim


def dim_curve(hs: Horseshoe, p):
    return _curves(hs, p)[3]


def bernoulli_stats(hs: Horseshoe, p: float, r: float) -> BernoulliStats:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if r < 0:
        raise ValueError("r must be >= 0")
    h, lam1, lam2, dim = (float(x) for x in _curves(hs, p))
    return BernoulliStats(p=float(p), h=h, lambda1=lam1, lambda2=lam2, dim=dim, hr=h + r * dim)


def _derivatives(hs: Horseshoe, p: float):
    """First derivatives of ``h`` and ``dim`` in ``p`` on ``(0, 1)``."""
    l1, l2 = hs.logs
    h = float(_entropy(p))
    dh = math.log1p(-p) - math.log(p)
    lam1 = -p * l1 - (1 - p) * l2
    lam2 = p * l2 + (1 - p) * l1
    dlam1 = l2 - l1
    dlam2 = l2 - l1
    ddim = (dh * lam1 - h * dlam1) / lam1**2 - (dh * lam2 - h * dlam2) / lam2**2
    return dh, ddim


def hr_derivative(hs: Horseshoe, p: float, r: float) -> float:
    dh, ddim = _derivatives(hs, p)
    return dh + r * ddim


def dim_derivative(hs: Horseshoe, p: float) -> float:
    return _derivatives(hs, p)[1]


def hr_derivatives_at_half(hs: Horseshoe, r: float) -> tuple[float, float]:
    """First and second derivative of ``h^r`` at ``p = 1/2``.

    The first vanishes identically by the ``p <-> 1 - p`` symmetry; the
    second is

        -4 + 16 r ((L1 + L2)^2 - 2 log 2 (L1 - L2)^2) / (L1 + L2)^3

    with ``L_i = log eta_i``.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    l1, l2 = hs.logs
    s, d = l1 + l2, l1 - l2
    second = -4.0 + 16.0 * r * (s * s - 2.0 * math.log(2.0) * d * d) / s**3
    return 0.0, second


def critical_r(hs: Horseshoe, r_max: float = 3.0, n: int = 301):
    """Scan ``(0, r_max]`` for the ``r`` where the curvature at 1/2 changes sign.

    Returns ``(r_c, r_lo, r_hi)`` where ``[r_lo, r_hi]`` is the scan cell
    bracketing the sign change, or ``None`` when the sign never changes.
    """
    rs = np.linspace(r_max / n, r_max, n)
    vals = [hr_derivatives_at_half(hs, r)[1] for r in rs]
    prev_r, prev_v = 0.0, hr_derivatives_at_half(hs, 0.0)[1]
    for r, v in zip(rs, vals):
        if prev_v < 0 <= v or prev_v > 0 >= v:
            if v == 0:
                return float(r), float(prev_r), float(r)
            rc = brentq(lambda x: hr_derivatives_at_half(hs, x)[1], prev_r, r, xtol=1e-14)
            return float(rc), float(prev_r), float(r)
        prev_r, prev_v = r, v
    return None


def _polish(fprime, x: float, lo: float, hi: float) -> float:
    """Sharpen a golden-section estimate with a root of the derivative."""
    a, b = max(lo, P_EDGE), min(hi, 1 - P_EDGE)
    try:
        fa, fb = fprime(a), fprime(b)
    except (ValueError, ZeroDivisionError):
        return x
    if fa > 0 > fb:
        return brentq(fprime, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return x


def _maximize(hs: Horseshoe, f_vec, f_prime, grid_n: int):
    grid = np.linspace(P_EDGE, 1 - P_EDGE, grid_n)
    vals = f_vec(grid)
    out = []
    for i in grid_local_maxima(vals):
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid_n - 1)]
        x, _ = golden_section_max(lambda t: float(f_vec(t)), lo, hi, tol=1e-10)
        x = _polish(f_prime, x, lo, hi)
        out.append((float(x), float(f_vec(x))))
    return sorted(out)


def find_bernoulli_maximizers(hs: Horseshoe, r: float, grid_n: int = 2001) -> list[tuple[float, float]]:
    """All interior local maxima of ``p -> h^r(p)``, sorted by ``p``."""
    if grid_n < 100:
        raise ValueError("grid_n must be >= 100")
    return _maximize(hs, lambda p: hr_curve(hs, p, r), lambda p: hr_derivative(hs, p, r), grid_n)


def best_bernoulli(hs: Horseshoe, r: float, grid_n: int = 2001) -> tuple[float, float]:
    """Global maximiser ``(p*, h^r(p*))`` with ``p* <= 1/2`` among symmetric ties."""
    cands = find_bernoulli_maximizers(hs, r, grid_n)
    top = max(v for _, v in cands)
    ties = [c for c in cands if top - c[1] <= 1e-12]
    return ties[0]


def mmhd_bernoulli(hs: Horseshoe, grid_n: int = 2001) -> float:
    """Bernoulli parameter maximising the Hausdorff dimension ``dim(p)``."""
    cands = _maximize(hs, lambda p: dim_curve(hs, p), lambda p: dim_derivative(hs, p), grid_n)
    top = max(v for _, v in cands)
    return [c for c in cands if top - c[1] <= 1e-12][0][0]


def markov_crosscheck(hs: Horseshoe, r: float, grid_n: int = 101) -> float:
    """Best ``h + r dim`` over two-state Markov measures on a grid.

    Exponents of a Markov measure only see its mass on the first strip,
    while its entropy is at most that of the Bernoulli measure with the
    same mass, so this never beats :func:`best_bernoulli`.
    """
    l1, l2 = hs.logs
    a = np.linspace(0.0, 1.0, grid_n)
    p01, p10 = np.meshgrid(a, a, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        mass0 = np.where(p01 + p10 > 0, p10 / (p01 + p10), 0.5)
        h = mass0 * (_entropy(p01)) + (1 - mass0) * (_entropy(p10))
    lam1 = -mass0 * l1 - (1 - mass0) * l2
    lam2 = mass0 * l2 + (1 - mass0) * l1
    val = h + r * h * (1.0 / lam1 - 1.0 / lam2)
    return float(np.max(val))
