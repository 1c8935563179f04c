"""Two-sided subshifts of finite type, the shift metric and cylinder sets.

Bi-infinite sequences are only ever handled through finite coordinate
windows.  The central fact used throughout the package is that in the
metric ``d_theta(x, y) = theta ** N(x, y)`` the r-neutralized Bowen ball
``B(x, n, exp(-n r))`` is exactly the cylinder fixing the coordinates
``-m .. n + m - 1`` of ``x`` with ``m = floor(-r n / log theta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import EmptyRowOrColumn, InvalidSystem, NonSquare, OrbitTooShort

if TYPE_CHECKING:
    from .thermo import MarkovMeasure

# log_count_words takes the log of the exact integer count up to this length
EXACT_COUNT_MAX = 64


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Sft:
    """Topological Markov shift on ``k`` symbols given by a 0/1 matrix."""

    k: int
    adjacency: np.ndarray
    primitive: bool

    def allows(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i, j])

    def is_admissible(self, symbols) -> bool:
        s = np.asarray(symbols, dtype=np.int64)
        if s.size == 0:
            return True
        if s.min() < 0 or s.max() >= self.k:
            return False
        return bool(np.all(self.adjacency[s[:-1], s[1:]]))

    def __repr__(self):
        rows = ";".join(",".join(str(int(v)) for v in row) for row in self.adjacency)
        return f"Sft(k={self.k}, adjacency=[{rows}], primitive={self.primitive})"


def _is_primitive(a: np.ndarray) -> bool:
    k = a.shape[0]
    # Wielandt: a primitive matrix has A^((k-1)^2 + 1) > 0
    power = (k - 1) ** 2 + 1
    b = a.astype(bool)
    m = np.eye(k, dtype=bool)
    base = b.copy()
    while power:
        if power & 1:
            m = (m.astype(np.int64) @ base.astype(np.int64)) > 0
        base = (base.astype(np.int64) @ base.astype(np.int64)) > 0
        power >>= 1
    return bool(m.all())


def build_sft(adjacency) -> Sft:
    """Validate a 0/1 adjacency matrix and wrap it as an :class:`Sft`.

    Raises
    ------
    NonSquare
        If the matrix is not square (or not two-dimensional).
    EmptyRowOrColumn
        If some symbol has no successor or no predecessor.
    """
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NonSquare(f"adjacency must be a non-empty square matrix, got shape {a.shape}")
    if not np.all((a == 0) | (a == 1)):
        raise InvalidSystem("adjacency entries must be 0 or 1")
    a = a.astype(np.int64)
    for i in range(a.shape[0]):
        if not a[i].any():
            raise EmptyRowOrColumn(f"row {i} has no outgoing edge (symbol {i} has no successor)")
        if not a[:, i].any():
            raise EmptyRowOrColumn(f"column {i} has no incoming edge (symbol {i} has no predecessor)")
    return Sft(k=a.shape[0], adjacency=_frozen(a), primitive=_is_primitive(a))


def full_shift(k: int = 2) -> Sft:
    return build_sft(np.ones((k, k), dtype=int))


def golden_mean_shift() -> Sft:
    return build_sft([[1, 1], [1, 0]])


def count_words(sft: Sft, n: int) -> int:
    """Number of admissible words of length ``n`` (exact integer)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = [[int(v) for v in row] for row in sft.adjacency]
    v = [1] * sft.k
    for _ in range(n - 1):
        v = [sum(a[i][j] * v[j] for j in range(sft.k)) for i in range(sft.k)]
    return sum(v)


def log_count_words(sft: Sft, n: int) -> float:
    """Natural log of :func:`count_words`, via rescaled float iteration beyond 64."""
    if n <= EXACT_COUNT_MAX:
        return math.log(count_words(sft, n))
    a = sft.adjacency.astype(float)
    v = np.ones(sft.k)
    acc = 0.0
    for _ in range(n - 1):
        v = a @ v
        s = v.sum()
        acc += math.log(s)
        v /= s
    return acc + math.log(v.sum())


@dataclass(frozen=True)
class ShiftMetric:
    """``d_theta(x, y) = theta ** N(x, y)``, ``N`` the first disagreement in ``|i|``."""

    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise InvalidSystem(f"theta must lie in (0, 1), got {self.theta}")

    def distance(self, x: "Word", y: "Word") -> float:
        """Distance between two points known on the same coordinate window.

        Both points are assumed to agree outside the window; identical
        windows give distance 0 (the disagreement time is infinite).
        """
        if x.base_index != y.base_index or len(x) != len(y):
            raise ValueError("words must cover the same coordinates")
        diff = np.nonzero(x.symbols != y.symbols)[0]
        if diff.size == 0:
            return 0.0
        n = int(np.min(np.abs(diff + x.base_index)))
        return self.theta ** n


@dataclass(frozen=True, eq=False)
class Word:
    """Finite block of symbols placed at coordinates ``base_index, base_index + 1, ...``."""

    symbols: np.ndarray
    base_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "symbols", _frozen(np.asarray(self.symbols, dtype=np.int64)))

    def __len__(self):
        return int(self.symbols.size)

    @property
    def end_index(self) -> int:
        """One past the last covered coordinate."""
        return self.base_index + len(self)

    def window(self, start: int, stop: int) -> "Word":
        """Sub-word covering coordinates ``start .. stop - 1``."""
        if start < self.base_index or stop > self.end_index:
            raise OrbitTooShort(
                f"coordinates {start}..{stop - 1} not covered by word on "
                f"{self.base_index}..{self.end_index - 1}"
            )
        lo = start - self.base_index
        return Word(self.symbols[lo : lo + (stop - start)], start)

    def __str__(self):
        return "".join(str(int(s)) for s in self.symbols)


@dataclass(frozen=True)
class BallWindow:
    n: int
    m: int

    @property
    def total_len(self) -> int:
        return self.n + 2 * self.m

    @property
    def start(self) -> int:
        return -self.m

    @property
    def stop(self) -> int:
        return self.n + self.m


def neutral_padding(n: int, r: float, metric: ShiftMetric) -> int:
    c = -r * n / math.log(metric.theta)
    nearest = round(c)
    # snap representation noise such as 10/-log(exp(-1)) = 9.999999999999998
    if abs(c - nearest) <= 1e-9 * max(1.0, abs(c)):
        return int(nearest)
    return int(math.floor(c))


def ball_window(n: int, r: float, metric: ShiftMetric) -> BallWindow:
    """Coordinate window of the r-neutralized Bowen ball of length ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if r < 0:
        raise ValueError("r must be >= 0")
    return BallWindow(n=n, m=neutral_padding(n, r, metric))


def log_cylinder_measure(markov: "MarkovMeasure", word: Word) -> float:
    s = word.symbols
    if s.size == 0:
        return 0.0
    with np.errstate(divide="ignore"):
        lp = np.log(markov.P[s[:-1], s[1:]])
        first = np.log(markov.pi[s[0]])
    return float(first + math.fsum(lp)) if np.all(np.isfinite(lp)) else -math.inf


def cylinder_measure(markov: "MarkovMeasure", word: Word) -> tuple[float, float]:
    """Measure of the cylinder ``[word]`` under a stationary Markov measure.

    Returns ``(measure, log_measure)``; the log is accumulated as a sum so
    long windows do not underflow.  Forbidden words give ``(0.0, -inf)``.
    """
    lm = log_cylinder_measure(markov, word)
    return math.exp(lm), lm


def _cumulative(P: np.ndarray) -> np.ndarray:
    """Row-wise cumulative sums; the last reachable state absorbs rounding."""
    cum = np.cumsum(P, axis=1)
    for i in range(P.shape[0]):
        nz = np.nonzero(P[i] > 0)[0]
        last = nz[-1] if nz.size else P.shape[1] - 1
        cum[i, last:] = np.inf
    return cum


def reversed_chain(markov: "MarkovMeasure") -> np.ndarray:
    """Time reversal ``P*_ij = pi_j P_ji / pi_i`` (rows of null states left uniform)."""
    pi, P = markov.pi, markov.P
    k = pi.size
    rev = np.full((k, k), 1.0 / k)
    for i in range(k):
        if pi[i] > 0:
            rev[i] = pi * P[:, i] / pi[i]
            rev[i] /= rev[i].sum()
    return rev


def _run_chain(cum: np.ndarray, start: np.ndarray, u: np.ndarray) -> np.ndarray:
    # u has shape (samples, steps); next state = #{cum entries <= u}
    out = np.empty(u.shape, dtype=np.int64)
    s = start
    for t in range(u.shape[1]):
        s = np.sum(cum[s] <= u[:, t : t + 1], axis=1)
        out[:, t] = s
    return out


def sample_orbits(markov: "MarkovMeasure", length: int, seeds, backward: int = 0) -> np.ndarray:
    """Stationary trajectories, one row per seed, covering ``-backward .. length - 1``.

    Each row depends only on its own seed: coordinate 0 is drawn from
    ``pi``, coordinates ``1 ..`` from ``P`` and negative coordinates from
    the time-reversed chain, which for a stationary chain gives the exact
    two-sided law.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if backward < 0:
        raise ValueError("backward must be >= 0")
    seeds = list(seeds)
    u = np.empty((len(seeds), length + backward))
    for row, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        u[row] = rng.random(length + backward)
    pi_cum = np.cumsum(markov.pi)
    pi_cum[np.nonzero(markov.pi > 0)[0][-1] :] = np.inf
    x0 = np.sum(pi_cum[None, :] <= u[:, :1], axis=1)
    fwd = _run_chain(_cumulative(markov.P), x0, u[:, 1:length])
    back = _run_chain(_cumulative(reversed_chain(markov)), x0, u[:, length:])
    return np.hstack([back[:, ::-1], x0[:, None], fwd])


def sample_orbit(markov: "MarkovMeasure", length: int, seed: int, backward: int = 0) -> Word:
    """Single trajectory as a :class:`Word` based at ``-backward``."""
    return Word(sample_orbits(markov, length, [seed], backward)[0], -backward)
