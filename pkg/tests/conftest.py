import numpy as np
import pytest
from hypothesis import settings

from lphj.lie import SE3, SO3, GroupElement, random_group_element

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def rot_z(theta):
    c, s = np.cos(theta), np.sin(theta)
    return GroupElement(SO3, np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]))


@pytest.fixture
def random_so3(rng):
    return lambda: random_group_element(SO3, rng)


@pytest.fixture
def random_se3(rng):
    return lambda: random_group_element(SE3, rng)


# ---------------------------------------------------------------- acceptance

_ACCEPTANCE_LINES = []


def record_acceptance(number, title, passed, detail):
    _ACCEPTANCE_LINES.append((number, title, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number}. {title}: {detail}")
