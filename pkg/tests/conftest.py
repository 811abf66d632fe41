import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("labelqm", deadline=None, max_examples=60)
settings.load_profile("labelqm")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def three_sigma(p, n):
    return 3 * np.sqrt(p * (1 - p) / n)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
