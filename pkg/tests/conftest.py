import contextlib
import os

import numpy as np
import pytest

# property tests draw from fixed seeds; keep the semantic tolerance at its default
os.environ.pop("HQCL_TOL", None)

_CRITERIA: dict[int, bool] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record a pass/fail line for an acceptance criterion.

    Usage: ``with criterion(3): ...``.  Any exception inside the block marks
    the criterion failed and propagates to pytest.
    """

    @contextlib.contextmanager
    def record(number: int):
        try:
            yield
        except BaseException:
            _CRITERIA[number] = False
            print(f"criterion {number}: FAIL")
            raise
        _CRITERIA.setdefault(number, True)
        print(f"criterion {number}: PASS")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if _CRITERIA[number] else 'FAIL'}")
