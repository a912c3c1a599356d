import pytest

_CRITERIA: dict[int, str] = {}
_RESULTS: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion this test covers")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _CRITERIA[m.args[0]] = m.args[1]


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _RESULTS.setdefault(m.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        runs = _RESULTS.get(n, [])
        status = "PASS" if runs and all(runs) else ("NOT RUN" if not runs else "FAIL")
        terminalreporter.write_line(f"{status} {n:2d}. {_CRITERIA[n]}")
