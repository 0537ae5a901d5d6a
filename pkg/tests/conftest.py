import numpy as np
import pytest

# (criterion number, label, passed) tuples collected by test_acceptance
ACCEPTANCE_RESULTS = []


def record_criterion(idx: int, label: str, passed: bool) -> None:
    ACCEPTANCE_RESULTS.append((idx, label, passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for idx, label, ok in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(
                f"criterion {idx} ({label}): {'PASS' if ok else 'FAIL'}")


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


def random_records(rng, n, value_lo=0.0, value_hi=100.0):
    """n random (x, y, z) rows with coordinates in [0, 1)."""
    out = rng.random((n, 3))
    out[:, 2] = value_lo + out[:, 2] * (value_hi - value_lo)
    return out


def random_queries(rng, m):
    return rng.random((m, 2))
