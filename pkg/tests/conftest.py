import hypothesis
import numpy as np
import pytest

from dualchua import ChuaParams, preset

np.seterr(all="warn")

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

_ACCEPTANCE = []


@pytest.fixture
def nominal_circuit():
    return preset("multisim")


@pytest.fixture
def nominal_params():
    return ChuaParams(8.0, 12.5)


@pytest.fixture
def acceptance_report():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def report(number, name, ok, detail=""):
        line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
        _ACCEPTANCE.append((number, line))
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
