"""Flat ``dotted.key = value`` run configuration.

Example::

    # reference horseshoe
    system.kind = horseshoe
    system.eta1 = 0.9703
    system.eta2 = 0.9703 ** 117
    r.grid = 0, 3

Matrices are written row by row, rows separated by ``;`` and entries by
commas or spaces (``system.adjacency = 1 1; 1 0``).  Numbers may be
plain floats, ``exp(x)`` or ``a ** b``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InvalidSystem
from .horseshoe import Horseshoe, induced_system
from .sft import ShiftMetric, build_sft
from .surface import TwoPotentialSystem
from .thermo import DEFAULT_TOL, LocallyConstantPotential

KNOWN_KEYS = {
    "system.kind", "system.eta1", "system.eta2", "system.adjacency", "system.phi_u", "system.phi_s",
    "metric.theta", "r", "r.grid", "n", "samples", "seed",
    "grid.p.min", "grid.p.max", "grid.p.n", "grid.q.min", "grid.q.max", "grid.q.n",
    "derivative.step", "mmrne.mode", "mmrne.box", "mmrne.grid_n",
    "verify.measure", "verify.weights", "verify.transition",
    "horseshoe.grid_n", "horseshoe.r_max",
    "tol.eigen", "tol.search", "output.path",
}

_EXP = re.compile(r"^exp\((.+)\)$")


def parse_number(text: str) -> float:
    t = text.strip()
    m = _EXP.match(t)
    if m:
        return math.exp(parse_number(m.group(1)))
    if "**" in t:
        base, _, power = t.partition("**")
        return parse_number(base) ** parse_number(power)
    return float(t)


def _split_entries(text: str) -> list[str]:
    return [e for e in re.split(r"[,\s]+", text.strip()) if e]


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)
    system: TwoPotentialSystem | None = None
    horseshoe: Horseshoe | None = None
    metric: ShiftMetric | None = None

    def has(self, key: str) -> bool:
        return key in self.values

    def _fail(self, key, message):
        raise ConfigError(f"{key}: {message}", self.lines.get(key))

    def number(self, key: str, default=None) -> float:
        if key not in self.values:
            if default is None:
                self._fail(key, "required key missing")
            return default
        try:
            return parse_number(self.values[key])
        except (ValueError, OverflowError):
            self._fail(key, f"not a number: {self.values[key]!r}")

    def integer(self, key: str, default=None) -> int:
        x = self.number(key, default)
        if x != int(x):
            self._fail(key, f"expected an integer, got {self.values[key]!r}")
        return int(x)

    def numbers(self, key: str, default=None) -> list[float]:
        if key not in self.values:
            if default is None:
                self._fail(key, "required key missing")
            return list(default)
        try:
            return [parse_number(e) for e in _split_entries(self.values[key])]
        except (ValueError, OverflowError):
            self._fail(key, f"not a list of numbers: {self.values[key]!r}")

    def matrix(self, key: str, integer: bool = False) -> np.ndarray:
        text = self.values.get(key)
        if text is None:
            self._fail(key, "required key missing")
        rows = []
        for i, chunk in enumerate(text.split(";")):
            entries = _split_entries(chunk)
            try:
                row = [parse_number(e) for e in entries]
            except ValueError:
                self._fail(key, f"row {i} has a non-numeric entry: {chunk.strip()!r}")
            if integer and any(v not in (0.0, 1.0) for v in row):
                self._fail(key, f"row {i} has entries other than 0/1: {chunk.strip()!r}")
            if rows and len(row) != len(rows[0]):
                self._fail(key, f"row {i} has {len(row)} entries, row 0 has {len(rows[0])}")
            rows.append(row)
        return np.array(rows, dtype=float)

    def potential(self, key: str, k: int) -> LocallyConstantPotential:
        m = self.matrix(key)
        values = m[0] if m.shape[0] == 1 else m
        if values.shape[0] != k or (values.ndim == 2 and values.shape[1] != k):
            self._fail(key, f"expected {k} values or a {k}x{k} matrix, got shape {values.shape}")
        return LocallyConstantPotential(values)

    def r_values(self) -> list[float]:
        if self.has("r.grid"):
            rs = self.numbers("r.grid")
        else:
            rs = [self.number("r")]
        if any(r < 0 for r in rs):
            self._fail("r.grid" if self.has("r.grid") else "r", "r must be >= 0")
        return rs

    @property
    def eigen_tol(self) -> float:
        return self.number("tol.eigen", DEFAULT_TOL)


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = (s.strip() for s in line.partition("="))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in cfg.values:
            raise ConfigError(f"duplicate key {key!r} (first on line {cfg.lines[key]})", lineno)
        cfg.values[key] = value
        cfg.lines[key] = lineno
    _build(cfg)
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _build(cfg: RunConfig) -> None:
    kind = cfg.values.get("system.kind")
    try:
        if kind == "horseshoe":
            cfg.horseshoe = Horseshoe(cfg.number("system.eta1"), cfg.number("system.eta2"))
            cfg.system = induced_system(cfg.horseshoe)
        elif kind == "sft":
            try:
                sft = build_sft(cfg.matrix("system.adjacency", integer=True).astype(int))
            except InvalidSystem as exc:
                cfg._fail("system.adjacency", str(exc))
            cfg.system = TwoPotentialSystem(
                sft, cfg.potential("system.phi_u", sft.k), cfg.potential("system.phi_s", sft.k)
            )
        elif kind is not None:
            cfg._fail("system.kind", f"expected 'horseshoe' or 'sft', got {kind!r}")
    except ConfigError:
        raise
    except InvalidSystem as exc:
        raise ConfigError(str(exc), cfg.lines.get("system.kind")) from exc
    if cfg.has("metric.theta"):
        try:
            cfg.metric = ShiftMetric(cfg.number("metric.theta"))
        except InvalidSystem as exc:
            cfg._fail("metric.theta", str(exc))
