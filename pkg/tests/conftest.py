import pytest

from svat.fixtures import builtin_model


@pytest.fixture(scope="session")
def model1():
    return builtin_model(1)


@pytest.fixture(scope="session")
def model2():
    return builtin_model(2)


@pytest.fixture(scope="session")
def model3():
    return builtin_model(3)


_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _markers.get(report.nodeid)
    if marker is None:
        return
    number, title = marker
    entry = _criteria.setdefault(number, {"title": title, "failed": [], "total": 0})
    entry["total"] += 1
    if report.outcome != "passed":
        entry["failed"].append(report.nodeid.split("::")[-1])


_markers: dict[str, tuple[int, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _markers[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "FAIL" if entry["failed"] else "PASS"
        line = f"[{status}] criterion {number}: {entry['title']}"
        if entry["failed"]:
            line += f" (failing: {', '.join(entry['failed'])})"
        terminalreporter.write_line(line)
