from pathlib import Path

import pytest

from nfat.ingest import parse_lines
from nfat.store import EvidenceStore

DATA = Path(__file__).resolve().parent.parent / "data"
FIG11 = DATA / "fig11_events.csv"
FIG12 = DATA / "fig12_tcp.csv"
FIG13 = DATA / "fig13_udp.csv"
RULES = DATA / "criteria_default.csv"


def read_events(path):
    with open(path, encoding="utf-8") as fh:
        return [ev for _, ev in parse_lines(fh)]


@pytest.fixture
def fig11_events():
    return read_events(FIG11)


@pytest.fixture
def store(tmp_path):
    return EvidenceStore(tmp_path / "store", lock_timeout=0.5)


@pytest.fixture
def demo_case(store):
    store.create_case("demo", "lab incident", "investigator")
    return "demo"


# -- acceptance summary -----------------------------------------------------

_criteria: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _criteria.get(name, "PASS")
        _criteria[name] = "PASS" if prev == "PASS" and report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        terminalreporter.write_line(f"[{_criteria[name]}] {name}")
