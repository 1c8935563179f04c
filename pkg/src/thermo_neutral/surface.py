"""The pressure surface ``Q(p, q) = P(-p phi_u + q phi_s)`` and derived fields.

At every parameter pair the equilibrium state ``nu_{p,q}`` is computed
exactly as a Markov measure, so the exponents are Gibbs integrals (the
derivatives of ``Q``) rather than finite differences.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .cycles import cycle_mean_range
from .errors import Degenerate, InvalidSystem, PositivityViolated, TargetOutOfRange
from .sft import Sft
from .thermo import (
    DEFAULT_TOL,
    LocallyConstantPotential,
    MarkovMeasure,
    integrate,
    markov_entropy,
    pressure_of,
)

log = logging.getLogger(__name__)

TOL_COH = 1e-9
GAMMA_RESIDUAL = 1e-10
GAMMA_BRACKET_CAP = 1e6


@dataclass(frozen=True, eq=False)
class TwoPotentialSystem:
    """A shift with an expanding potential ``phi_u`` and a contracting ``phi_s``."""

    sft: Sft
    phi_u: LocallyConstantPotential
    phi_s: LocallyConstantPotential
    name: str = ""

    def __post_init__(self):
        for label, phi in (("phi_u", self.phi_u), ("phi_s", self.phi_s)):
            if phi.k != self.sft.k:
                raise InvalidSystem(f"{label} has {phi.k} symbols, shift has {self.sft.k}")
        lo_u, _ = cycle_mean_range(self.sft.adjacency, self.phi_u.edge_values())
        _, hi_s = cycle_mean_range(self.sft.adjacency, self.phi_s.edge_values())
        if not lo_u > 0:
            raise InvalidSystem(f"phi_u has a cycle with mean {lo_u:.6g} <= 0 (not expanding)")
        if not hi_s < 0:
            raise InvalidSystem(f"phi_s has a cycle with mean {hi_s:.6g} >= 0 (not contracting)")

    def potential(self, which: str) -> LocallyConstantPotential:
        if which == "u":
            return self.phi_u
        if which == "s":
            return self.phi_s
        raise ValueError(f"which must be 'u' or 's', got {which!r}")


@dataclass(frozen=True, eq=False)
class EquilibriumPoint:
    p: float
    q: float
    Q: float
    lambda_u: float
    lambda_s: float
    h: float
    d_u: float
    d_s: float
    dim: float
    measure: MarkovMeasure

    def row(self) -> dict:
        return {
            "p": self.p, "q": self.q, "Q": self.Q,
            "lambda_u": self.lambda_u, "lambda_s": self.lambda_s, "h": self.h,
            "d_u": self.d_u, "d_s": self.d_s, "dim": self.dim,
        }


@dataclass(frozen=True)
class ExponentInterval:
    min: float
    max: float
    tol: float = TOL_COH

    @property
    def empty_interior(self) -> bool:
        return abs(self.max - self.min) < self.tol

    @property
    def width(self) -> float:
        return self.max - self.min

    def contains_strictly(self, x: float) -> bool:
        return self.min < x < self.max and not self.empty_interior

    def endpoint_distance(self, x: float) -> float:
        """Distance from ``x`` to the nearer end (useful to flag saturation)."""
        return min(abs(x - self.min), abs(x - self.max))


def eval_point(sys: TwoPotentialSystem, p: float, q: float, tol: float = DEFAULT_TOL) -> EquilibriumPoint:
    phi = -p * sys.phi_u + q * sys.phi_s
    Q, nu = pressure_of(sys.sft, phi, tol)
    lam_u = integrate(sys.phi_u, nu)
    lam_s = integrate(sys.phi_s, nu)
    h = Q + p * lam_u - q * lam_s
    if h < 0:
        if h < -1e-12:
            raise PositivityViolated(f"entropy {h:.3e} < 0 at (p, q) = ({p}, {q})")
        log.warning("entropy %.3e < 0 at (p, q) = (%g, %g); clamping to 0", h, p, q)
        h = 0.0
    d_u = h / lam_u
    d_s = -h / lam_s
    return EquilibriumPoint(
        p=float(p), q=float(q), Q=Q, lambda_u=lam_u, lambda_s=lam_s, h=h,
        d_u=d_u, d_s=d_s, dim=d_u + d_s, measure=nu,
    )


def entropy_check(point: EquilibriumPoint) -> float:
    """Distance between ``h`` from the surface identity and the Markov entropy."""
    return abs(point.h - markov_entropy(point.measure))


def derivative_check(sys: TwoPotentialSystem, p: float, q: float, step: float = 1e-5) -> tuple[float, float]:
    """Central-difference residuals of ``lambda_u = -dQ/dp`` and ``lambda_s = dQ/dq``."""
    if not step > 0:
        raise ValueError("step must be positive")
    pt = eval_point(sys, p, q)
    dq_dp = (eval_point(sys, p + step, q).Q - eval_point(sys, p - step, q).Q) / (2 * step)
    dq_dq = (eval_point(sys, p, q + step).Q - eval_point(sys, p, q - step).Q) / (2 * step)
    return abs(pt.lambda_u + dq_dp), abs(pt.lambda_s - dq_dq)


def exponent_range(sys: TwoPotentialSystem, which: str) -> ExponentInterval:
    """Extremes of ``int phi d nu`` over invariant measures = extreme cycle means."""
    lo, hi = cycle_mean_range(sys.sft.adjacency, sys.potential(which).edge_values())
    return ExponentInterval(lo, hi)


def is_cohomologous_to_constant(sys: TwoPotentialSystem, which: str) -> bool:
    return exponent_range(sys, which).empty_interior


def potential_is_cohomologous_to_constant(sft: Sft, phi: LocallyConstantPotential, tol: float = TOL_COH) -> bool:
    lo, hi = cycle_mean_range(sft.adjacency, phi.edge_values())
    return abs(hi - lo) < tol


def _solve_monotone(f, increasing: bool) -> float:
    # f has a root; expand [-1, 1] by doubling until the sign changes
    f0 = f(0.0)
    if f0 == 0.0:
        return 0.0
    lo, hi = -1.0, 1.0
    sign = 1.0 if increasing else -1.0
    flo, fhi = sign * f(lo), sign * f(hi)
    while flo > 0:
        lo *= 2.0
        if abs(lo) > GAMMA_BRACKET_CAP:
            raise TargetOutOfRange("no root with |parameter| <= 1e6")
        flo = sign * f(lo)
    while fhi < 0:
        hi *= 2.0
        if abs(hi) > GAMMA_BRACKET_CAP:
            raise TargetOutOfRange("no root with |parameter| <= 1e6")
        fhi = sign * f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def gamma_s(sys: TwoPotentialSystem, p: float, b: float) -> float:
    """``q`` with ``lambda_s(p, q) = b``; ``lambda_s(p, .)`` is increasing."""
    interval = exponent_range(sys, "s")
    if interval.empty_interior:
        raise Degenerate("phi_s is cohomologous to a constant")
    if not interval.contains_strictly(b):
        raise TargetOutOfRange(f"target {b} outside I_s = ({interval.min}, {interval.max})")
    q = _solve_monotone(lambda q: eval_point(sys, p, q).lambda_s - b, increasing=True)
    res = abs(eval_point(sys, p, q).lambda_s - b)
    if res >= GAMMA_RESIDUAL:
        log.warning("gamma_s residual %.3e at p=%g, b=%g", res, p, b)
    return q


def gamma_u(sys: TwoPotentialSystem, q: float, a: float) -> float:
    """``p`` with ``lambda_u(p, q) = a``; ``lambda_u(., q)`` is decreasing."""
    interval = exponent_range(sys, "u")
    if interval.empty_interior:
        raise Degenerate("phi_u is cohomologous to a constant")
    if not interval.contains_strictly(a):
        raise TargetOutOfRange(f"target {a} outside I_u = ({interval.min}, {interval.max})")
    p = _solve_monotone(lambda p: eval_point(sys, p, q).lambda_u - a, increasing=False)
    res = abs(eval_point(sys, p, q).lambda_u - a)
    if res >= GAMMA_RESIDUAL:
        log.warning("gamma_u residual %.3e at q=%g, a=%g", res, q, a)
    return p


def neutralized_entropy(point: EquilibriumPoint, r: float) -> float:
    """``h + r dim``; this is the r-neutralized entropy of ``nu_{p,q}``."""
    if r < 0:
        raise ValueError("r must be >= 0")
    if math.isinf(r):
        raise ValueError("r = inf has no finite value; maximise dim instead")
    return point.h + r * point.dim
