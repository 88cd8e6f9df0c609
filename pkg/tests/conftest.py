from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import pytest

from copri_lint.cml import parse_model

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_outcomes: dict[int, list[str]] = defaultdict(list)
_titles: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion a test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            number, title = mark.args
            _titles[number] = title
            _outcomes.setdefault(number, [])


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = dict(report.user_properties).get("acceptance")
    if mark is not None:
        _outcomes[mark].append(report.outcome)


def pytest_runtest_setup(item):
    mark = item.get_closest_marker("acceptance")
    if mark:
        item.user_properties.append(("acceptance", mark.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_titles):
        results = _outcomes.get(number, [])
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(r == "passed" for r in results) else "FAIL"
        terminalreporter.write_line(f"[{status}] AC{number} {_titles[number]} ({len(results)} tests)")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def load_fixture(name: str):
    path = FIXTURES / name
    return parse_model(path.read_text(encoding="utf-8"), str(path))


@pytest.fixture(scope="session")
def aal():
    return load_fixture("aal.cml")
