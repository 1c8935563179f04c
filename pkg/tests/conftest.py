import math

import numpy as np
import pytest

from thermo_neutral.sft import ShiftMetric, golden_mean_shift
from thermo_neutral.systems import bundled_shifts, bundled_systems
from thermo_neutral.thermo import LocallyConstantPotential, pressure_of

GOLDEN = (1 + math.sqrt(5)) / 2


@pytest.fixture(scope="session")
def shifts():
    return bundled_shifts()


@pytest.fixture(scope="session")
def systems():
    return bundled_systems()


@pytest.fixture(scope="session")
def parry_golden():
    sft = golden_mean_shift()
    return pressure_of(sft, LocallyConstantPotential.constant(0.0, 2))[1]


@pytest.fixture
def metric_e():
    return ShiftMetric(math.exp(-1))


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
