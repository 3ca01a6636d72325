import numpy as np
import pytest

from dualcas.constants import C
from dualcas.response import AtomModel, MaterialModel


def random_material(rng, electric=True, magnetic=True, name=""):
    """Lorentz-oscillator medium with 1-2 oscillators per enabled response."""

    def oscs():
        return [(rng.uniform(0.3, 2.0) * 1e16, rng.uniform(0.0, 1.0) * 1e16, rng.uniform(0, 0.05) * 1e16)
                for _ in range(rng.integers(1, 3))]

    return MaterialModel(oscs() if electric else (), oscs() if magnetic else (), name)


def random_atom(rng, electric=True, magnetic=True):
    lines_a = [(rng.uniform(0.5, 5) * 1e-39, rng.uniform(0.5, 5) * 1e15)] if electric else []
    lines_b = [(rng.uniform(0.5, 5) * 1e-39 * C**2, rng.uniform(0.5, 5) * 1e15)] if magnetic else []
    return AtomModel(lines_a, lines_b)


@pytest.fixture
def rng():
    return np.random.default_rng(20260915)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
