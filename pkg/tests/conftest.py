import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, list[str]] = {}
_NAMES: dict[int, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    ids = [v for k, v in report.user_properties if k == "criterion"]
    if ids:
        _CRITERIA.setdefault(ids[0], []).append(report.outcome)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args[0]))
            if len(m.args) > 1:
                _NAMES[m.args[0]] = m.args[1]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, name): acceptance criterion number")
    config.addinivalue_line("markers", "slow: long-running statistical test")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        outcomes = _CRITERIA[n]
        if "failed" in outcomes:
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIP"
        else:
            status = "PASS"
        tr.write_line(f"criterion {n:>2} {status}  {_NAMES.get(n, '')}")
