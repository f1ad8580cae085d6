import numpy as np
import pytest

from pullfit.design import Half, SeriesKind
from pullfit.observer import Condition, TrialRecord

_ACCEPTANCE = []


@pytest.fixture
def record_criterion():
    """Log one acceptance line: ``record_criterion(number, name, passed, detail)``."""
    def record(number, name, passed, detail=""):
        _ACCEPTANCE.append((number, name, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def single(trial_id, kind, true, estimate, half=None):
    kind = SeriesKind(kind)
    if half is None:
        half = Half.TOP if true >= 70 else Half.BOTTOM
    return TrialRecord(trial_id, Condition.SINGLE, kind, Half(half), true, None, None, estimate)


def compound(trial_id, kind, true, nontrue, estimate, half=None):
    kind = SeriesKind(kind)
    if half is None:
        half = Half.TOP if true >= 70 else Half.BOTTOM
    return TrialRecord(trial_id, Condition.COMPOUND, kind, Half(half), true, kind.other,
                       nontrue, estimate)
