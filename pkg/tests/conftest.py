import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion."""
    entry = {"name": request.node.name, "detail": "", "passed": False}
    _ACCEPTANCE.append(entry)

    def note(detail):
        entry["detail"] = detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    entry["passed"] = bool(rep and rep.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for e in _ACCEPTANCE:
        verdict = "PASS" if e["passed"] else "FAIL"
        terminalreporter.write_line(f"{verdict}  {e['name']}  {e['detail']}")
