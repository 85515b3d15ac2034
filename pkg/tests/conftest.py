import numpy as np
import pytest

from mfdlab.network import NetworkConfig, build_network


@pytest.fixture
def small_cfg():
    return NetworkConfig(rows=3, cols=4, ell=6, lam=1.0, delta=0.0, p=0.75, seed=3)


@pytest.fixture
def small_net(small_cfg):
    return build_network(small_cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line, then assert it."""

    def _verdict(number: int, ok: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _verdict


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
