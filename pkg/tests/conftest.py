import pytest

from parityscan import backend

BACKENDS = backend.available()

_acceptance_results = {}


@pytest.fixture(params=BACKENDS)
def backend_name(request):
    return request.param


@pytest.fixture(params=BACKENDS)
def kern(request):
    return backend.load(request.param)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _acceptance_results[(number, item.name)] = (title, rep.outcome, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), (title, outcome, duration) in sorted(_acceptance_results.items()):
        tag = "PASS" if outcome == "passed" else "FAIL" if outcome == "failed" else outcome.upper()
        terminalreporter.write_line(f"[{tag}] criterion {number:>2}: {title} ({name}, {duration:.2f}s)")
