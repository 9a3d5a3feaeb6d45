import pytest

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(num, label): end-to-end acceptance check; each one gets a "
        "PASS/FAIL line in the terminal summary")


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        num, label = marker.args
        if report.when == "call":
            _RESULTS[num] = (label, "PASS" if report.passed else "FAIL")
        elif report.when == "setup" and not report.passed:
            _RESULTS[num] = (label, "SKIP" if report.skipped else "FAIL")
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        label, status = _RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {label:<56} {status}")
