"""Bundled shifts and two-potential systems used by tests, demos and the CLI."""
from __future__ import annotations

import numpy as np

from .horseshoe import Horseshoe, induced_system
from .sft import Sft, build_sft, full_shift, golden_mean_shift
from .surface import TwoPotentialSystem
from .thermo import LocallyConstantPotential


def three_symbol_shift() -> Sft:
    return build_sft([[1, 1, 0], [0, 1, 1], [1, 0, 1]])


def bundled_shifts() -> dict[str, Sft]:
    return {
        "full2": full_shift(2),
        "golden": golden_mean_shift(),
        "three": three_symbol_shift(),
    }


def golden_system() -> TwoPotentialSystem:
    return TwoPotentialSystem(
        golden_mean_shift(),
        LocallyConstantPotential([1.0, 2.0]),
        LocallyConstantPotential([-1.0, -2.0]),
        name="golden",
    )


def three_symbol_system() -> TwoPotentialSystem:
    # edge-dependent contraction exercises the depth-2 code path
    phi_s = np.array([[-0.7, -1.1, 0.0], [0.0, -0.5, -1.3], [-0.9, 0.0, -1.8]])
    return TwoPotentialSystem(
        three_symbol_shift(),
        LocallyConstantPotential([0.6, 1.2, 2.1]),
        LocallyConstantPotential(phi_s),
        name="three",
    )


def bundled_systems() -> dict[str, TwoPotentialSystem]:
    return {
        "horseshoe_0.4_0.2": induced_system(Horseshoe(0.4, 0.2)),
        "golden": golden_system(),
        "three": three_symbol_system(),
    }
