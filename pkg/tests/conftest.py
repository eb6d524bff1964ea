import re

_VERDICTS = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m or report.when != "call" and report.outcome == "passed":
        return
    lines = [ln for ln in report.capstdout.splitlines() if ln.startswith(("[PASS]", "[FAIL]"))]
    n = int(m.group(1))
    if lines:
        _VERDICTS[n] = lines[-1]
    elif report.outcome != "passed":
        _VERDICTS[n] = f"[FAIL] criterion {n}: error during {report.when}"


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_VERDICTS):
        terminalreporter.write_line(_VERDICTS[n])
