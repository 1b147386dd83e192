import math

import pytest

from abforce.constants import E_CHARGE, M_E
from abforce.physics import beam_from_kev

_CRITERIA = []


def flux_for_epsilon(eps, beam, y_e):
    """Flux [Wb] giving perturbation strength ``eps`` at impact parameter ``y_e``."""
    return eps * 2.0 * math.pi * M_E * beam.speed * abs(y_e) / E_CHARGE


@pytest.fixture
def beam_1kev():
    return beam_from_kev(1.0)


@pytest.fixture
def beam_20kev():
    return beam_from_kev(20.0)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion" in report.nodeid:
        props = dict(report.user_properties)
        _CRITERIA.append((report.nodeid.split("::")[-1], report.outcome, props))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, props in _CRITERIA:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        failed = props.get("failed", [])
        total = props.get("checks")
        tally = "" if total is None else f"  ({total - len(failed)}/{total} checks)"
        terminalreporter.write_line(f"{verdict}  {name}{tally}")
        for line in failed:
            terminalreporter.write_line(f"        {line}")


def approx(expected, rel=1e-12, abs=0.0):
    """``pytest.approx`` without its default 1e-12 absolute slack, which would swamp SI-scale values."""
    return pytest.approx(expected, rel=rel, abs=abs)
