import numpy as np
import pytest
from hypothesis import settings

from tfpsi._rng import complex_normal, make_rng
from tfpsi.phase import periodized_gaussian, tighten
from tfpsi.seqalg import PhaseLattice

settings.register_profile("repo", max_examples=25, deadline=None, derandomize=True)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def lat33():
    return PhaseLattice(33, 3, 3)


@pytest.fixture(scope="session")
def sys33(lat33):
    return tighten(periodized_gaussian(33), lat33)


@pytest.fixture(scope="session")
def sys15():
    return tighten(periodized_gaussian(15), PhaseLattice(15, 3, 1))


@pytest.fixture
def rng():
    return make_rng(20240601)


def rand_signal(rng, n):
    return complex_normal(rng, n)


def rand_symbol(rng, n):
    return complex_normal(rng, (n, n))


@pytest.fixture
def verdict(request):
    """Record one acceptance line and fail the test when the criterion is not met."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", {})

    def record(number: int, title: str, ok: bool, detail: str):
        lines[number] = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        print(lines[number])
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])
