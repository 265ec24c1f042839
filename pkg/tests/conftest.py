import numpy as np
import pytest

from focklab.symbols import HarmonicSymbol


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def make_symbol(rng, max_a=3, max_b=3):
    """Random dense harmonic symbol with complex coefficients."""
    da = int(rng.integers(0, max_a + 1))
    db = int(rng.integers(0, max_b + 1))
    c = lambda: complex(*rng.normal(size=2))  # noqa: E731
    return HarmonicSymbol({i: c() for i in range(da + 1)}, {j: c() for j in range(1, db + 1)})


@pytest.fixture
def random_symbol(rng):
    def factory(max_a=3, max_b=3):
        return make_symbol(rng, max_a, max_b)

    return factory


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        passed, detail = results[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
