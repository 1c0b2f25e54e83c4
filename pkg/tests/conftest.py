import math

import numpy as np
import pytest

from cocycle_spectra import linalg2 as la
from cocycle_spectra.cocycle_spectrum import reference_cocycle
from cocycle_spectra.thermo import word_exponents


def random_sl2(rng, max_log_sv=1.5):
    """Random SL(2,R) matrix ``R(a) diag(s, 1/s) R(b)`` with ``log s`` bounded."""
    s = math.exp(rng.uniform(0.0, max_log_sv))
    return (la.Mat2.rotation(rng.uniform(0, 2 * math.pi)) @ la.Mat2.diag(s, 1 / s)
            @ la.Mat2.rotation(rng.uniform(0, 2 * math.pi)))


def random_words(rng, count, length, N=2):
    from cocycle_spectra.symbolic import Word

    return [Word(tuple(int(x) for x in rng.integers(0, N, length)), N) for _ in range(count)]


@pytest.fixture(scope="session")
def ref_family():
    return reference_cocycle()


@pytest.fixture(scope="session")
def ref_system(ref_family):
    return ref_family.fiber_system()


@pytest.fixture(scope="session")
def exponents16(ref_system):
    return word_exponents(ref_system, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
