import numpy as np
import pytest

from drsubmax import box, build_body

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] #{key:<2d} {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def unit_box():
    return box([0.0, 0.0], [1.0, 1.0])


@pytest.fixture(scope="session")
def triangle():
    return build_body([[1.0, 1.0]], [1.0], d=2)


@pytest.fixture(scope="session")
def inner_box():
    return box([0.2, 0.2], [0.8, 0.8])


@pytest.fixture(scope="session")
def segment():
    return build_body(E=[[1.0, 1.0]], f=[1.0], d=2)
