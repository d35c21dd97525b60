import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


@pytest.fixture
def problems() -> Path:
    return PROBLEMS


# -- acceptance report -------------------------------------------------------
# Tests marked ``criterion(n, title)`` are grouped; a criterion passes when
# every one of its tests passes (an expected failure still counts as FAIL).

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_collection_finish(session):
    for item in session.items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            n, title = m.args
            _CRITERIA.setdefault(n, {"title": title, "outcomes": {}})
            _CRITERIA[n]["outcomes"][item.nodeid] = None


def pytest_runtest_logreport(report):
    for entry in _CRITERIA.values():
        if report.nodeid not in entry["outcomes"]:
            continue
        ok = report.passed and not hasattr(report, "wasxfail")
        if report.when == "call" or not report.passed:
            prev = entry["outcomes"][report.nodeid]
            entry["outcomes"][report.nodeid] = ok if prev is None else (prev and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        entry = _CRITERIA[n]
        results = list(entry["outcomes"].values())
        if any(r is None for r in results):
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n:>2}  {status:<7} {entry['title']}")
