from collections import OrderedDict

_acceptance = OrderedDict()


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if report.when == "call" or report.outcome != "passed":
        ok = report.outcome == "passed"
        _acceptance[name] = _acceptance.get(name, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for name, label in CRITERIA.items():
        if name in _acceptance:
            status = "PASS" if _acceptance[name] else "FAIL"
            terminalreporter.write_line(f"{status}  criterion {label}")
