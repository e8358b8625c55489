import sys
import warnings

import pytest

warnings.filterwarnings("ignore", message=".*TBB.*")

SEED = 20140601


@pytest.fixture
def seed():
    return SEED


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
