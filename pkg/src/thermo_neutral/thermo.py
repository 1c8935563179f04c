"""Pressure, Gibbs measures and entropy for locally constant potentials.

For a potential depending on at most two coordinates the topological
pressure is ``log rho(L)`` where ``L_ij = A_ij exp(phi(i, j))``; the unique
equilibrium state is the Markov measure built from the Perron vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSystem, NoConvergence, NotPrimitive, PositivityViolated
from .sft import Sft, _frozen

DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITERS = 10**6
# edge log-weights further than this below the maximum are clamped (exp underflow)
_LOG_WEIGHT_FLOOR = -700.0


@dataclass(frozen=True, eq=False)
class LocallyConstantPotential:
    """Potential depending on ``x_0`` (depth 1) or on ``x_0 x_1`` (depth 2)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim not in (1, 2) or (v.ndim == 2 and v.shape[0] != v.shape[1]):
            raise InvalidSystem(f"potential must be a vector or square matrix, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidSystem("potential values must be finite")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def depth(self) -> int:
        return self.values.ndim

    @property
    def k(self) -> int:
        return self.values.shape[0]

    def edge_values(self) -> np.ndarray:
        """Value on every edge ``i -> j`` as a ``k x k`` array."""
        if self.depth == 1:
            return np.repeat(self.values[:, None], self.k, axis=1)
        return np.array(self.values)

    @classmethod
    def constant(cls, c: float, k: int) -> "LocallyConstantPotential":
        return cls(np.full(k, float(c)))

    def _combine(self, other, fa, fb):
        if isinstance(other, LocallyConstantPotential):
            if other.k != self.k:
                raise InvalidSystem("potentials live on different alphabets")
            if self.depth == other.depth:
                return LocallyConstantPotential(fb(self.values, other.values))
            return LocallyConstantPotential(fb(self.edge_values(), other.edge_values()))
        return LocallyConstantPotential(fa(self.values, float(other)))

    def __add__(self, other):
        return self._combine(other, np.add, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract, np.subtract)

    def __mul__(self, c):
        return LocallyConstantPotential(self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return LocallyConstantPotential(-self.values)


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """Stationary Markov measure: transition matrix ``P`` and invariant vector ``pi``."""

    P: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        k = P.shape[0]
        if P.ndim != 2 or P.shape != (k, k) or pi.shape != (k,):
            raise InvalidSystem("P must be k x k and pi of length k")
        if np.any(P < 0) or np.any(pi < 0):
            raise InvalidSystem("probabilities must be nonnegative")
        if np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
            raise InvalidSystem("rows of P must sum to 1")
        if abs(pi.sum() - 1.0) > 1e-12:
            raise InvalidSystem("pi must sum to 1")
        if np.max(np.abs(pi @ P - pi)) > 1e-10:
            raise InvalidSystem("pi is not stationary for P")
        object.__setattr__(self, "P", _frozen(P))
        object.__setattr__(self, "pi", _frozen(pi))

    @property
    def k(self) -> int:
        return self.pi.size

    def supported_on(self, sft: Sft) -> bool:
        return bool(np.all((self.P == 0) | (sft.adjacency == 1)))

    @classmethod
    def bernoulli(cls, weights) -> "MarkovMeasure":
        w = np.asarray(weights, dtype=float)
        w = w / w.sum()
        return cls(np.tile(w, (w.size, 1)), w)

    @classmethod
    def from_transition(cls, P) -> "MarkovMeasure":
        """Attach the stationary vector of an irreducible stochastic matrix."""
        P = np.asarray(P, dtype=float)
        k = P.shape[0]
        a = np.vstack([P.T - np.eye(k), np.ones(k)])
        b = np.zeros(k + 1)
        b[-1] = 1.0
        pi, *_ = np.linalg.lstsq(a, b, rcond=None)
        pi = np.clip(pi, 0.0, None)
        return cls(P, pi / pi.sum())


@dataclass(frozen=True, eq=False)
class PressureResult:
    pressure: float
    right_vec: np.ndarray
    left_vec: np.ndarray
    iterations: int
    residual: float

    @property
    def rho(self) -> float:
        return math.exp(self.pressure)


def transfer_matrix(sft: Sft, phi: LocallyConstantPotential) -> np.ndarray:
    """``L_ij = A_ij exp(phi(i, j))``; depth-1 potentials use ``phi(i)``."""
    if not sft.primitive:
        raise NotPrimitive("pressure needs a primitive (mixing) adjacency matrix")
    if phi.k != sft.k:
        raise InvalidSystem(f"potential has {phi.k} symbols, shift has {sft.k}")
    return sft.adjacency * np.exp(phi.edge_values())


def _power(L: np.ndarray, tol: float, max_iters: int):
    """Perron vector of ``L`` (l1-normalised) by power iteration.

    Every test step ``v -> Lv / |Lv|`` is followed by a jump with the
    running power ``M = L^(2^j)`` (rescaled), so a slowly mixing matrix
    needs O(log) rather than O(1/gap) steps.  Convergence is always
    judged on the plain step with ``L``.
    """
    k = L.shape[0]
    v = np.full(k, 1.0 / k)
    M = L / L.max()
    for it in range(1, max_iters + 1):
        w = L @ v
        s = w.sum()
        if not s > 0:
            raise PositivityViolated("spectral radius estimate is not positive")
        w /= s
        if np.abs(w - v).sum() <= tol:
            return w, it
        v = M @ w
        s = v.sum()
        if not s > 0:
            v = w
        else:
            v /= s
        M = M @ M
        m = M.max()
        if not m > 0 or not np.isfinite(m):
            M = L / L.max()
        else:
            M /= m
    raise NoConvergence(f"power iteration did not converge in {max_iters} iterations")


def pressure(L, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS) -> PressureResult:
    """Log spectral radius of a nonnegative primitive matrix with Perron vectors.

    Simultaneous right/left power iteration with l1 normalisation.  The
    eigenvalue is taken as the Rayleigh quotient ``u L v / u v`` of the
    converged vectors.  On return ``sum(right_vec) == 1`` and
    ``left_vec @ right_vec == 1``.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise InvalidSystem("transfer matrix must be square")
    if np.any(L < 0):
        raise InvalidSystem("transfer matrix must be nonnegative")
    v, it_r = _power(L, tol, max_iters)
    u, it_l = _power(L.T.copy(), tol, max_iters)
    uv = u @ v
    if not uv > 0:
        raise PositivityViolated("left and right Perron vectors are orthogonal")
    rho = (u @ L @ v) / uv
    if not rho > 0:
        raise PositivityViolated("spectral radius is zero")
    residual = float(np.abs(L @ v - rho * v).sum() / rho)
    return PressureResult(
        pressure=math.log(rho),
        right_vec=_frozen(v),
        left_vec=_frozen(u / uv),
        iterations=max(it_r, it_l),
        residual=residual,
    )


def gibbs_markov(L, result: PressureResult) -> MarkovMeasure:
    """Stochasticise ``L`` with its Perron data: ``P_ij = L_ij v_j / (rho v_i)``."""
    L = np.asarray(L, dtype=float)
    v, u = result.right_vec, result.left_vec
    P = L * v[None, :] / (result.rho * v[:, None])
    P /= P.sum(axis=1, keepdims=True)
    pi = u * v
    pi /= pi.sum()
    # one stationary sweep removes the O(residual) drift of the Perron product
    pi = pi @ P
    pi /= pi.sum()
    return MarkovMeasure(P, pi)


def pressure_of(sft: Sft, phi: LocallyConstantPotential, tol: float = DEFAULT_TOL):
    """Pressure and equilibrium state of ``phi`` on ``sft``.

    The potential is shifted by its maximum before exponentiating so that
    large parameters neither overflow nor lose the Perron structure.
    """
    ev = np.where(sft.adjacency == 1, phi.edge_values(), -np.inf)
    c = float(np.max(ev))
    shifted = np.maximum(phi.edge_values() - c, _LOG_WEIGHT_FLOOR)
    L = transfer_matrix(sft, LocallyConstantPotential(shifted))
    res = pressure(L, tol)
    return res.pressure + c, gibbs_markov(L, res)


def markov_entropy(m: MarkovMeasure) -> float:
    """``-sum_i pi_i sum_j P_ij log P_ij`` with ``0 log 0 = 0``."""
    P = m.P
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, P * np.log(P), 0.0)
    return float(max(0.0, -(m.pi @ terms.sum(axis=1))))


def integrate(phi: LocallyConstantPotential, m: MarkovMeasure) -> float:
    if phi.k != m.k:
        raise InvalidSystem("potential and measure live on different alphabets")
    if phi.depth == 1:
        return float(m.pi @ phi.values)
    return float(np.sum(m.pi[:, None] * m.P * phi.values))
