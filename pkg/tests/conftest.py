import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

DATA = os.path.join(os.path.dirname(__file__), "data")
MINICORPUS = os.path.join(DATA, "minicorpus")

# acceptance outcomes: criterion number -> (title, passed, detail)
_CRITERIA = {}
_DETAILS = {}


def note(number, detail):
    """Attach a one-line measurement to an acceptance criterion's summary."""
    _DETAILS[number] = detail


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    number, title = marker.args
    _CRITERIA[number] = (title, rep.passed)
    print(f"\ncriterion {number:>2} {'PASS' if rep.passed else 'FAIL'}: {title}"
          f"{' [' + _DETAILS[number] + ']' if number in _DETAILS else ''}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed = _CRITERIA[number]
        detail = f" [{_DETAILS[number]}]" if number in _DETAILS else ""
        terminalreporter.write_line(
            f"criterion {number:>2} {'PASS' if passed else 'FAIL'}: {title}{detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def minicorpus():
    return MINICORPUS
