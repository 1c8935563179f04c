"""Command line front end: ``thermo-neutral <command> --config <path>``.

Every command writes one CSV (header row, LF line endings, floats with
17 significant digits) so runs with the same config and seed are
byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys

import numpy as np

from . import horseshoe as hsmod
from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    InvalidSystem,
    NoConvergence,
    PositivityViolated,
    PreconditionViolated,
)
from .mmrne import DEFAULT_BOX, DEFAULT_GRID_N, sweep
from .surface import derivative_check, eval_point
from .thermo import LocallyConstantPotential, MarkovMeasure, pressure_of
from .verify import estimate_neutralized_entropy

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PRECONDITION = 0, 2, 3, 4

PRESSURE_COLUMNS = ["p", "q", "Q", "lambda_u", "lambda_s", "h", "d_u", "d_s", "dim", "residual_u", "residual_s"]
MMRNE_COLUMNS = ["r", "mode", "p", "q", "hr_max", "h", "dim", "edge_hit", "n_maximizers", "multiple_maximizers"]
VERIFY_COLUMNS = ["r", "theta", "n", "samples", "mean", "stddev", "predicted"]
HORSESHOE_COLUMNS = [
    "r", "first_derivative", "second_derivative", "n_maximizers", "p_star", "p_mirror", "hr_star", "hr_half",
]


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def _require_system(cfg: RunConfig):
    if cfg.system is None:
        raise ConfigError("system.kind is required for this command")
    return cfg.system


def _axis(cfg: RunConfig, name: str) -> np.ndarray:
    lo = cfg.number(f"grid.{name}.min", -2.0)
    hi = cfg.number(f"grid.{name}.max", 2.0)
    n = cfg.integer(f"grid.{name}.n", 5)
    if n < 1:
        raise ConfigError(f"grid.{name}.n must be >= 1", cfg.lines.get(f"grid.{name}.n"))
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


def cmd_pressure(cfg: RunConfig, seed=None, threads=1) -> tuple[str, list[str]]:
    sys_ = _require_system(cfg)
    step = cfg.number("derivative.step", 1e-5)
    rows = []
    for p in _axis(cfg, "p"):
        for q in _axis(cfg, "q"):
            pt = eval_point(sys_, float(p), float(q), cfg.eigen_tol)
            row = pt.row()
            row["residual_u"], row["residual_s"] = derivative_check(sys_, float(p), float(q), step)
            rows.append(row)
    return to_csv(PRESSURE_COLUMNS, rows), []


def cmd_mmrne(cfg: RunConfig, seed=None, threads=1) -> tuple[str, list[str]]:
    sys_ = _require_system(cfg)
    mode = cfg.values.get("mmrne.mode", "bernoulli" if cfg.horseshoe is not None else "family")
    if mode == "bernoulli":
        if cfg.horseshoe is None:
            raise ConfigError("mmrne.mode = bernoulli needs system.kind = horseshoe", cfg.lines.get("mmrne.mode"))
        records = sweep(cfg.horseshoe, cfg.r_values(), threads)
    elif mode == "family":
        records = sweep(
            sys_, cfg.r_values(), threads,
            box=cfg.number("mmrne.box", DEFAULT_BOX), grid_n=cfg.integer("mmrne.grid_n", DEFAULT_GRID_N),
        )
    else:
        raise ConfigError(f"mmrne.mode must be 'family' or 'bernoulli', got {mode!r}", cfg.lines.get("mmrne.mode"))
    rows = []
    for rec in records:
        rows.append({
            "r": rec.r, "mode": rec.mode, "p": rec.p, "q": rec.q, "hr_max": rec.hr_max, "h": rec.h,
            "dim": rec.dim, "edge_hit": rec.edge_hit, "n_maximizers": rec.n_maximizers,
            "multiple_maximizers": rec.n_maximizers > 1,
        })
    return to_csv(MMRNE_COLUMNS, rows), []


def _verify_measure(cfg: RunConfig) -> MarkovMeasure:
    kind = cfg.values.get("verify.measure", "parry")
    line = cfg.lines.get("verify.measure")
    if kind == "bernoulli":
        return MarkovMeasure.bernoulli(cfg.numbers("verify.weights"))
    if kind == "markov":
        return MarkovMeasure.from_transition(cfg.matrix("verify.transition"))
    if kind == "parry":
        sys_ = _require_system(cfg)
        _, mu = pressure_of(sys_.sft, LocallyConstantPotential.constant(0.0, sys_.sft.k), cfg.eigen_tol)
        return mu
    raise ConfigError(f"verify.measure must be bernoulli, markov or parry, got {kind!r}", line)


def cmd_verify_symbolic(cfg: RunConfig, seed=None, threads=1) -> tuple[str, list[str]]:
    if cfg.metric is None:
        raise ConfigError("metric.theta is required for verify")
    mu = _verify_measure(cfg)
    if seed is None:
        seed = cfg.integer("seed", 0)
    samples = cfg.integer("samples", 100)
    ns = [int(n) for n in cfg.numbers("n")]
    rows = []
    for r in sorted(cfg.r_values()):
        for n in ns:
            est = estimate_neutralized_entropy(mu, cfg.metric, r, n, samples, seed)
            rows.append(est.row())
    return to_csv(VERIFY_COLUMNS, rows), []


def cmd_horseshoe_demo(cfg: RunConfig, seed=None, threads=1) -> tuple[str, list[str]]:
    hs = cfg.horseshoe if cfg.horseshoe is not None else hsmod.Horseshoe.reference()
    grid_n = cfg.integer("horseshoe.grid_n", 2001)
    rs = sorted(cfg.r_values()) if (cfg.has("r") or cfg.has("r.grid")) else [0.0, 3.0]
    rows, summary = [], [f"horseshoe eta1 = {fmt(hs.eta1)}, eta2 = {fmt(hs.eta2)}"]
    for r in rs:
        first, second = hsmod.hr_derivatives_at_half(hs, r)
        maxima = hsmod.find_bernoulli_maximizers(hs, r, grid_n)
        top = max(v for _, v in maxima)
        best = [m for m in maxima if top - m[1] <= 1e-12 * max(1.0, abs(top))]
        p_star, hr_star = best[0]
        p_mirror = best[-1][0]
        hr_half = hsmod.bernoulli_stats(hs, 0.5, r).hr
        rows.append({
            "r": r, "first_derivative": first, "second_derivative": second, "n_maximizers": len(best),
            "p_star": p_star, "p_mirror": p_mirror, "hr_star": hr_star, "hr_half": hr_half,
        })
        summary.append(
            f"r = {fmt(r)}: d/dp h^r(1/2) = {fmt(first)}, d2/dp2 h^r(1/2) = {second:.6f}, "
            f"maximizers = {{{', '.join(f'{p:.10f}' for p, _ in best)}}}"
        )
    r_max = cfg.number("horseshoe.r_max", 3.0)
    crit = hsmod.critical_r(hs, r_max)
    if crit is None:
        summary.append(f"critical r: no sign change of d2/dp2 h^r(1/2) in (0, {fmt(r_max)}]")
    else:
        rc, lo, hi = crit
        s_lo = hsmod.hr_derivatives_at_half(hs, lo)[1]
        s_hi = hsmod.hr_derivatives_at_half(hs, hi)[1]
        summary.append(
            f"critical r = {rc:.12f} (bracket [{lo:.6f}, {hi:.6f}], second derivative {s_lo:+.3e} -> {s_hi:+.3e})"
        )
    return to_csv(HORSESHOE_COLUMNS, rows), summary


COMMANDS = {
    "pressure": cmd_pressure,
    "mmrne": cmd_mmrne,
    "verify": cmd_verify_symbolic,
    "horseshoe": cmd_horseshoe_demo,
}


def _threads(arg) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("THERMO_NEUTRAL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"THERMO_NEUTRAL_THREADS must be an integer, got {env!r}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thermo-neutral", description="r-neutralized entropy toolkit")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="flat key = value configuration file")
    ap.add_argument("--out", default=None, help="CSV output path (default: output.path or stdout)")
    ap.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    ap.add_argument("--threads", type=int, default=None, help="worker processes for sweeps")
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = _threads(args.threads)
        cfg = load_config(args.config)
        text, summary = COMMANDS[args.command](cfg, seed=args.seed, threads=threads)
        out = args.out or cfg.values.get("output.path")
        if out:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            for line in summary:
                print(line)
        else:
            sys.stdout.write(text)
            for line in summary:
                print(line, file=sys.stderr)
    except (ConfigError, InvalidSystem) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoConvergence as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (PreconditionViolated, PositivityViolated) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
