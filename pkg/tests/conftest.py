"""Acceptance reporting: one PASS/FAIL line per criterion in the terminal summary."""

import pytest

RESULTS: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = marker.args
        passed = rep.outcome == "passed" and not hasattr(rep, "wasxfail")
        detail = getattr(item, "acceptance_detail", "")
        RESULTS[f"{number}:{item.name}"] = dict(number=number, title=title,
                                                passed=passed, detail=detail)


@pytest.fixture
def detail(request):
    """Attach a one-line summary to the acceptance report of this test."""

    def record(text):
        request.node.acceptance_detail = text

    return record


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: (RESULTS[k]["number"], k)):
        r = RESULTS[key]
        status = "PASS" if r["passed"] else "FAIL"
        line = f"criterion {r['number']} {status}: {r['title']}"
        if r["detail"]:
            line += f" [{r['detail']}]"
        terminalreporter.write_line(line)
