import pytest

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with the criterion number and a short summary."""
    state = {}

    def record(number, summary):
        state["key"] = (number, summary)

    yield record
    if "key" in state:
        number, summary = state["key"]
        _CRITERIA[number] = [summary, request.node]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        item._call_passed = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        summary, node = _CRITERIA[number]
        status = "PASS" if getattr(node, "_call_passed", False) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {summary}")
