import pytest

_ACCEPTANCE: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): end-to-end acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    detail = ""
    if report.failed and call.excinfo is not None:
        detail = str(call.excinfo.value).splitlines()[0][:160] if str(call.excinfo.value) else call.excinfo.typename
    _ACCEPTANCE.append((marker.args[0], "PASS" if report.passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, detail in sorted(_ACCEPTANCE):
        line = f"{status}  {label}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
