"""Exact and Monte Carlo checks of r-neutralized entropy on symbolic systems.

In the shift metric every neutralized Bowen ball is a two-sided cylinder
(:func:`~thermo_neutral.sft.ball_window`), so ball measures under a
Markov measure are exact products and neutralized spanning numbers are
word counts.  For a Markov measure ``mu`` and metric ``d_theta`` the
neutralized entropy is ``(1 - 2 r / log theta) h_mu``.
"""
from __future__ import annotations

import math
import statistics
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import WindowTooLarge
from .sft import (
    ShiftMetric,
    Sft,
    Word,
    ball_window,
    count_words,
    log_count_words,
    log_cylinder_measure,
    sample_orbits,
)
from .thermo import MarkovMeasure, markov_entropy

KATOK_MAX_WINDOW = 34


def metric_factor(r: float, metric: ShiftMetric) -> float:
    return 1.0 - 2.0 * r / math.log(metric.theta)


@dataclass(frozen=True)
class LocalEntropyEstimate:
    r: float
    theta: float
    n: int
    samples: int
    mean: float
    stddev: float
    predicted: float

    @property
    def stderr(self) -> float:
        return self.stddev / math.sqrt(self.samples)

    def row(self) -> dict:
        return {
            "r": self.r, "theta": self.theta, "n": self.n, "samples": self.samples,
            "mean": self.mean, "stddev": self.stddev, "predicted": self.predicted,
        }


def exact_local_entropy(m: MarkovMeasure, metric: ShiftMetric, r: float, orbit: Word, n: int) -> float:
    """``-(1/n) log mu(B(x, n, exp(-n r)))`` for the point ``x`` carried by ``orbit``.

    Raises :class:`~thermo_neutral.errors.OrbitTooShort` when ``orbit``
    does not cover the ball window.
    """
    w = ball_window(n, r, metric)
    return -log_cylinder_measure(m, orbit.window(w.start, w.stop)) / n


def estimate_neutralized_entropy(
    m: MarkovMeasure, metric: ShiftMetric, r: float, n: int, samples: int, seed: int
) -> LocalEntropyEstimate:
    """Mean and spread of the exact local value over ``samples`` orbits.

    Sample ``i`` uses seed ``seed + i``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    w = ball_window(n, r, metric)
    orbits = sample_orbits(m, n + w.m, range(seed, seed + samples), backward=w.m)
    values = [exact_local_entropy(m, metric, r, Word(row, -w.m), n) for row in orbits]
    mean = statistics.fmean(values)
    sd = statistics.stdev(values) if samples > 1 else 0.0
    return LocalEntropyEstimate(
        r=float(r), theta=metric.theta, n=n, samples=samples, mean=mean, stddev=sd,
        predicted=metric_factor(r, metric) * markov_entropy(m),
    )


def spanning_count(sft: Sft, metric: ShiftMetric, r: float, n: int) -> int:
    """Least number of neutralized Bowen balls covering the shift.

    The balls are the cylinders of one window and those tile the space,
    so the answer is the number of admissible words of the window length.
    """
    return count_words(sft, ball_window(n, r, metric).total_len)


def neutralized_top_entropy_estimate(sft: Sft, metric: ShiftMetric, r: float, n: int) -> float:
    return log_count_words(sft, ball_window(n, r, metric).total_len) / n


def _mass_classes(m: MarkovMeasure, length: int):
    """Admissible words of ``length`` grouped by (first symbol, transition counts).

    Words in one class share the same cylinder mass.  Returns a list of
    ``(log_mass, multiplicity)``.
    """
    k = m.k
    edges = [(i, j) for i in range(k) for j in range(k) if m.P[i, j] > 0]
    index = {e: t for t, e in enumerate(edges)}
    log_p = np.array([math.log(m.P[e]) for e in edges])
    zero = (0,) * len(edges)
    layer = {(s, s, zero): 1 for s in range(k) if m.pi[s] > 0}
    for _ in range(length - 1):
        nxt: dict = defaultdict(int)
        for (first, last, counts), mult in layer.items():
            for j in range(k):
                t = index.get((last, j))
                if t is None:
                    continue
                c = list(counts)
                c[t] += 1
                nxt[(first, j, tuple(c))] += mult
        layer = nxt
    out: dict = defaultdict(int)
    for (first, _, counts), mult in layer.items():
        out[(first, counts)] += mult
    return [
        (math.log(m.pi[first]) + float(np.dot(counts, log_p)), mult)
        for (first, counts), mult in out.items()
    ]


def katok_count(
    m: MarkovMeasure, metric: ShiftMetric, r: float, n: int, delta: float, max_window: int = KATOK_MAX_WINDOW
) -> int:
    """Fewest neutralized Bowen balls whose union has measure ``>= 1 - delta``.

    Balls are cylinders of one window, so greedily taking the heaviest
    cylinders is optimal.  Cylinders are handled by mass class rather than
    one at a time, which keeps the exact answer cheap up to the window cap.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    w = ball_window(n, r, metric)
    if w.total_len > max_window:
        raise WindowTooLarge(f"window length {w.total_len} exceeds {max_window}")
    target = 1.0 - delta
    classes = sorted(_mass_classes(m, w.total_len), key=lambda c: -c[0])
    covered = 0.0
    count = 0
    for log_mass, mult in classes:
        mass = math.exp(log_mass)
        if covered + mult * mass >= target:
            need = math.ceil((target - covered) / mass - 1e-9)
            return count + max(need, 1)
        covered += mult * mass
        count += mult
    return count


@dataclass(frozen=True)
class VariationalGap:
    top_estimate: float
    measure_estimates: tuple
    best_measure_estimate: float
    gap: float

    @property
    def relative_gap(self) -> float:
        return self.gap / self.top_estimate


def variational_gap(
    sft: Sft,
    metric: ShiftMetric,
    r: float,
    n: int,
    measures,
    samples: int = 200,
    seed: int = 0,
) -> VariationalGap:
    """Neutralized topological entropy minus the best measure-theoretic estimate."""
    top = neutralized_top_entropy_estimate(sft, metric, r, n)
    ests = tuple(estimate_neutralized_entropy(mu, metric, r, n, samples, seed) for mu in measures)
    best = max(e.mean for e in ests)
    return VariationalGap(top, ests, best, top - best)

