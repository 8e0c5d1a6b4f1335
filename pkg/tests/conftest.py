from pathlib import Path

import pytest

from erasmus_sna.ingest import Gender, InstitutionCode, MobilityRecord, MobilityType, StemClass
from erasmus_sna.network import FlowKey, Network

DATA = Path(__file__).parent / "data"


def rec(src, dst, gender="F", field="Education", year=2008, grant=1.0, mobility="Study", home_country=None, host_country=None):
    return MobilityRecord(
        year,
        InstitutionCode.parse(src),
        InstitutionCode.parse(dst),
        home_country or src[:2].strip().upper().ljust(2, "X"),
        host_country or dst[:2].strip().upper().ljust(2, "X"),
        Gender(gender),
        field,
        MobilityType(mobility),
        grant,
    )


def digraph(n, arcs, year=2008):
    """Network on nodes '0'..'n-1' (zero padded) with unit F/non-STEM weights."""
    names = [f"N{i:02d}" for i in range(n)]
    weights = {FlowKey(names[s], names[d], Gender.F, StemClass.NON_STEM): 1 for s, d in arcs}
    return Network(year, frozenset(names), weights)


@pytest.fixture
def data_dir():
    return DATA


_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_itemcollected(item):
    mark = item.get_closest_marker("criterion")
    if mark:
        item.user_properties.append(("criterion", mark.args))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.outcome != "passed":
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        num, title = props["criterion"]
        prev = _criteria.get(num)
        # one failing test fails the criterion
        if prev is None or prev[0] == "PASS":
            _criteria[num] = (outcome, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        outcome, title = _criteria[num]
        terminalreporter.write_line(f"criterion {num}: {outcome}  {title}")
