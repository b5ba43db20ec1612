import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_criteria: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.failed or (report.when == "call" and name not in _criteria):
        _criteria[name] = "PASS" if report.passed else "FAIL"
    elif report.skipped:
        _criteria[name] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda s: int(s.split("_")[2])):
        terminalreporter.write_line(f"{_criteria[name]}  {name}")
