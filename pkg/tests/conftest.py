import sys

import numpy as np
import pytest

from spteleport.fock import HilbertLayout, StateVector


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_state(layout: HilbertLayout, rng) -> StateVector:
    v = rng.normal(size=layout.dimension) + 1j * rng.normal(size=layout.dimension)
    return StateVector(layout, v / np.linalg.norm(v))


def ket(layout: HilbertLayout, *levels) -> StateVector:
    amps = np.zeros(layout.dims, dtype=complex)
    amps[levels] = 1.0
    return StateVector(layout, amps.reshape(-1))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS, key=lambda k: int(k.split()[0][2:])):
        terminalreporter.write_line(mod.RESULTS[key])
