from collections import defaultdict
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("repute", max_examples=200, deadline=None)
settings.load_profile("repute")

CRITERIA = {
    1: "value-sensitive increase table",
    2: "value-sensitive decrease table",
    3: "worked increase example chain",
    4: "worked decrease example chain",
    5: "ballot stuffing table",
    6: "dishonest sellers weeded out",
    7: "penalty asymmetry sweep",
    8: "fuzzy algebra suite",
    9: "deterministic transcripts",
}

_outcomes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        n = getattr(report, "criterion", None)
        if n is not None:
            _outcomes[n].append((report.nodeid, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, label in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            tr.write_line(f"criterion {n}: NOT RUN  {label}")
            continue
        failed = [nid for nid, out in results if out != "passed"]
        status = "FAIL" if failed else "PASS"
        tr.write_line(f"criterion {n}: {status}  {label} ({len(results) - len(failed)}/{len(results)})")
        for nid in failed:
            tr.write_line(f"    failed: {nid}")


@pytest.fixture(scope="session")
def data_dir():
    return Path(str(resources.files("repute") / "data"))


@pytest.fixture(scope="session")
def case_study_cfg(data_dir):
    return data_dir / "case_study.cfg"


@pytest.fixture(scope="session")
def scenario2_cfg(data_dir):
    return data_dir / "scenario2.cfg"


@pytest.fixture(scope="session")
def weeding_cfg(data_dir):
    return data_dir / "weeding.cfg"
