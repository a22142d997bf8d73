import pytest

_CRITERIA: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if hasattr(report, "wasxfail"):
            status = "XFAIL"
        else:
            status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _CRITERIA.setdefault(marker.args[0], []).append((item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA, key=lambda c: (isinstance(c, str), str(c).zfill(3))):
        results = _CRITERIA[n]
        failed = [name for name, status in results if status in ("FAIL", "SKIP")]
        known = [name for name, status in results if status == "XFAIL"]
        line = (f"criterion {n}:" if isinstance(n, int) else f"{n}:") + f" {'FAIL' if failed else 'PASS'} ({len(results)} tests)"
        if failed:
            line += f"; failing: {', '.join(failed)}"
        if known:
            line += f"; expected failure: {', '.join(known)}"
        terminalreporter.write_line(line)
