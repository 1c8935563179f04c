"""Maximising ``h + r dim`` over equilibrium families, r-sweeps and rigidity tests."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, root

from .cycles import cycle_mean_range
from .errors import TargetOutOfRange
from .horseshoe import Horseshoe, bernoulli_stats, find_bernoulli_maximizers, mmhd_bernoulli
from .search import golden_section_max
from .surface import (
    TOL_COH,
    TwoPotentialSystem,
    eval_point,
    exponent_range,
    gamma_s,
    gamma_u,
)

log = logging.getLogger(__name__)

DEFAULT_BOX = 5.0
# grid spacing 0.25 on the default box; narrow peaks of R_r are ~0.5 wide
DEFAULT_GRID_N = 41
MAX_STARTS = 4
TIE_TOL = 1e-12


@dataclass(frozen=True)
class RSweepRecord:
    r: float
    p: float
    q: float
    hr_max: float
    h: float
    dim: float
    edge_hit: bool = False
    mode: str = "family"
    n_maximizers: int = 1

    @property
    def argmax_params(self):
        return self.p if self.mode == "bernoulli" else (self.p, self.q)


def _objective(sys: TwoPotentialSystem, r: float):
    def f(p, q):
        pt = eval_point(sys, p, q)
        return pt.dim if math.isinf(r) else pt.h + r * pt.dim
    return f


def _pick(cands):
    # ties go to the point nearest the origin, then smaller p, then smaller q
    top = max(v for v, _, _ in cands)
    ties = [(p * p + q * q, p, q) for v, p, q in cands if top - v <= TIE_TOL * max(1.0, abs(top))]
    _, p, q = min(ties)
    return p, q


def _grid_peaks(values: np.ndarray) -> list[tuple[int, int]]:
    """Indices of grid points not beaten by any of their 8 neighbours."""
    n = values.shape[0]
    padded = np.pad(values, 1, constant_values=-np.inf)
    ok = np.ones_like(values, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                ok &= values >= padded[1 + di : 1 + di + n, 1 + dj : 1 + dj + n]
    return [tuple(ix) for ix in np.argwhere(ok)]


def _refine(R, p, q, box, cell, tol, rounds):
    for _ in range(rounds):
        p, _ = golden_section_max(lambda t: R(t, q), max(-box, p - cell), min(box, p + cell), tol)
        q, _ = golden_section_max(lambda t: R(p, t), max(-box, q - cell), min(box, q + cell), tol)
    start = np.array([p, q])
    simplex = np.array([start, start + [tol * 1e3, 0], start + [0, tol * 1e3]])
    res = minimize(
        lambda x: -R(*np.clip(x, -box, box)),
        start,
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": tol, "fatol": 1e-15, "maxiter": 200},
    )
    if -res.fun > R(p, q):
        p, q = (float(v) for v in np.clip(res.x, -box, box))
    return R(p, q), float(p), float(q)


def maximize_over_family(
    sys: TwoPotentialSystem,
    r: float,
    box: float = DEFAULT_BOX,
    grid_n: int = DEFAULT_GRID_N,
    tol: float = 1e-8,
    rounds: int = 2,
    starts: int = MAX_STARTS,
) -> RSweepRecord:
    """Best ``R_r(p, q) = h + r (d_u + d_s)`` over ``nu_{p,q}``, ``(p, q)`` in the box.

    A coarse grid locates candidate peaks; up to ``starts`` of the best
    grid peaks are refined (coordinate golden-section, then a
    Nelder-Mead polish) and the best refined point wins.  ``r = inf``
    maximises ``d_u + d_s`` alone.  When the best point sits on the box
    edge, ``edge_hit`` is set: exponents are then saturating toward an
    end of their range, where no equilibrium state attains the supremum.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if grid_n < 3:
        raise ValueError("grid_n must be >= 3")
    R = _objective(sys, r)
    if exponent_range(sys, "u").empty_interior and exponent_range(sys, "s").empty_interior:
        # both potentials are constants up to coboundaries: the family is the MME only
        p = q = 0.0
    else:
        axis = np.linspace(-box, box, grid_n)
        cell = axis[1] - axis[0]
        values = np.array([[R(float(a), float(b)) for b in axis] for a in axis])
        peaks = sorted(
            _grid_peaks(values),
            # values equal up to rounding count as ties and go to the point nearest the origin
            key=lambda ij: (-round(float(values[ij]), 10), axis[ij[0]] ** 2 + axis[ij[1]] ** 2),
        )
        chosen: list = []
        for i, j in peaks:
            if len(chosen) == starts:
                break
            # one start per separated peak; ridge neighbours add nothing
            if all(abs(i - a) + abs(j - b) > 2 for a, b in chosen):
                chosen.append((i, j))
        refined = [_refine(R, float(axis[i]), float(axis[j]), box, cell, tol, rounds) for i, j in chosen]
        p, q = _pick(refined)
    pt = eval_point(sys, p, q)
    hr = pt.dim if math.isinf(r) else pt.h + r * pt.dim
    edge = max(abs(p), abs(q)) >= box - 1e-6
    return RSweepRecord(r=float(r), p=float(p), q=float(q), hr_max=hr, h=pt.h, dim=pt.dim, edge_hit=edge)


def bernoulli_record(hs: Horseshoe, r: float, grid_n: int = 2001) -> RSweepRecord:
    """Sweep record from the Bernoulli family of the horseshoe (exact reduction)."""
    if math.isinf(r):
        p = mmhd_bernoulli(hs, grid_n)
        st = bernoulli_stats(hs, p, 0.0)
        n_max = 1 if abs(p - 0.5) < 1e-12 else 2
        return RSweepRecord(r=r, p=p, q=math.nan, hr_max=st.dim, h=st.h, dim=st.dim, mode="bernoulli", n_maximizers=n_max)
    cands = find_bernoulli_maximizers(hs, r, grid_n)
    top = max(v for _, v in cands)
    best = [c for c in cands if top - c[1] <= TIE_TOL * max(1.0, abs(top))]
    p = best[0][0]
    st = bernoulli_stats(hs, p, r)
    return RSweepRecord(
        r=float(r), p=p, q=math.nan, hr_max=st.hr, h=st.h, dim=st.dim,
        mode="bernoulli", n_maximizers=len(best),
    )


def _record(args):
    target, r, box, grid_n = args
    if isinstance(target, Horseshoe):
        return bernoulli_record(target, r)
    return maximize_over_family(target, r, box=box, grid_n=grid_n)


def sweep(
    target, r_values, threads: int = 1, box: float = DEFAULT_BOX, grid_n: int = DEFAULT_GRID_N
) -> list[RSweepRecord]:
    """One record per ``r`` (ascending).  ``target`` is a system or a :class:`Horseshoe`.

    Passing a :class:`Horseshoe` uses the Bernoulli reduction instead of
    the two-parameter family search.
    """
    rs = sorted(float(r) for r in r_values)
    if not rs:
        raise ValueError("r_values must be nonempty")
    if rs[0] < 0:
        raise ValueError("r values must be >= 0")
    jobs = [(target, r, box, grid_n) for r in rs]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(_record, jobs))
    return [_record(j) for j in jobs]


@dataclass
class RigidityReport:
    alpha: float
    u_range: tuple
    s_range: tuple
    psi_range: tuple
    u_constant: bool
    s_constant: bool
    psi_constant: bool
    branch: int | None
    notes: list = field(default_factory=list)

    @property
    def mme_can_be_mmrne(self) -> bool:
        return self.branch is not None

    @property
    def psi_residual(self) -> float:
        return self.psi_range[1] - self.psi_range[0]

    def lines(self) -> list[str]:
        return [
            f"alpha = {self.alpha:.17g}",
            f"phi_u cycle means [{self.u_range[0]:.17g}, {self.u_range[1]:.17g}] constant={self.u_constant}",
            f"phi_s cycle means [{self.s_range[0]:.17g}, {self.s_range[1]:.17g}] constant={self.s_constant}",
            f"psi cycle means [{self.psi_range[0]:.17g}, {self.psi_range[1]:.17g}] "
            f"residual={self.psi_residual:.3e} constant={self.psi_constant}",
            f"branch = {self.branch}; MME can be MMrNE: {self.mme_can_be_mmrne}",
        ]


def rigidity_mme_criterion(sys: TwoPotentialSystem) -> RigidityReport:
    """Necessary condition for the MME to maximise r-neutralized entropy.

    With ``alpha = lambda_u(0,0)^2 / lambda_s(0,0)^2`` and
    ``psi = -phi_u + alpha phi_s`` the MME can only be a maximiser when
    either both ``phi_u`` and ``phi_s`` are cohomologous to constants
    (branch 1) or neither is but ``psi`` is (branch 2).
    """
    mme = eval_point(sys, 0.0, 0.0)
    alpha = mme.lambda_u**2 / mme.lambda_s**2
    psi = -sys.phi_u + alpha * sys.phi_s
    a = sys.sft.adjacency
    ur = cycle_mean_range(a, sys.phi_u.edge_values())
    sr = cycle_mean_range(a, sys.phi_s.edge_values())
    pr = cycle_mean_range(a, psi.edge_values())
    uc, sc, pc = (abs(x[1] - x[0]) < TOL_COH for x in (ur, sr, pr))
    if uc and sc:
        branch = 1
    elif not uc and not sc and pc:
        branch = 2
    else:
        branch = None
    return RigidityReport(alpha, ur, sr, pr, uc, sc, pc, branch)


def equality_criterion(
    sys: TwoPotentialSystem, exponents, max_rounds: int = 200, tol: float = 1e-8, warm_rounds: int = 5
):
    """Parameters ``(p, q)`` whose equilibrium state has the given exponents.

    Alternates ``p = gamma_u(q, lu)`` and ``q = gamma_s(p, ls)``.  The
    alternation contracts only linearly when the two exponents are
    strongly coupled, so after ``warm_rounds`` the joint 2x2 system is
    solved directly (hybrid Powell) from the alternation's estimate and
    alternation resumes only if that fails.  Returns ``None`` if no point
    with joint residual below ``tol`` is found within ``max_rounds``.
    """
    lu, ls = exponents
    iu, is_ = exponent_range(sys, "u"), exponent_range(sys, "s")
    if not iu.contains_strictly(lu):
        raise TargetOutOfRange(f"lambda_u target {lu} not inside ({iu.min}, {iu.max})")
    if not is_.contains_strictly(ls):
        raise TargetOutOfRange(f"lambda_s target {ls} not inside ({is_.min}, {is_.max})")

    def residual(x):
        pt = eval_point(sys, float(x[0]), float(x[1]))
        return np.array([pt.lambda_u - lu, pt.lambda_s - ls])

    p = q = 0.0
    for rnd in range(max_rounds):
        if np.max(np.abs(residual((p, q)))) < tol:
            return p, q
        if rnd == warm_rounds:
            sol = root(residual, [p, q], method="hybr", options={"xtol": 1e-14})
            if np.all(np.isfinite(sol.x)) and np.max(np.abs(residual(sol.x))) < tol:
                return float(sol.x[0]), float(sol.x[1])
        p = gamma_u(sys, q, lu)
        q = gamma_s(sys, p, ls)
    log.warning("equality_criterion did not converge in %d rounds", max_rounds)
    return None
