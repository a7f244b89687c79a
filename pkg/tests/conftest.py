import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from medianlab.core import hypercube, path, product  # noqa: E402
from medianlab.oracle import enumerate_hypercube_subalgebras  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "data"

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    num = next((m.args[0] for m in getattr(report, "criterion_markers", ())), None)
    if num is None:
        return
    prev = _CRITERIA.get(num, "PASS")
    _CRITERIA[num] = "PASS" if prev == "PASS" and report.outcome == "passed" else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    report.criterion_markers = [m for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {num}: {_CRITERIA[num]}")


@pytest.fixture(scope="session")
def corpus3():
    return enumerate_hypercube_subalgebras(3)


@pytest.fixture
def p3():
    return path(3)


@pytest.fixture
def square():
    return hypercube(2)


@pytest.fixture
def cube3():
    return hypercube(3)


@pytest.fixture
def p3xc():
    return product(path(3), hypercube(1))


@pytest.fixture
def data_dir():
    return DATA
