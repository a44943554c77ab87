import numpy as np
import pytest

from ramanqkd.raman import DetectionParams, FiberParams


@pytest.fixture
def fiber():
    return FiberParams(alpha_mean_per_km=0.0484)


@pytest.fixture
def det():
    return DetectionParams(eta=0.045, tau_s=1e-9, filter_bandwidth_hz=10e9)


@pytest.fixture
def rng():
    return np.random.default_rng(20140601)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Print and record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_VERDICTS, [])

    def report(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        lines.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
