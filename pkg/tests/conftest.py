import pytest

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _ACCEPTANCE.setdefault(number, {"title": title, "ok": True, "details": []})
    if report.failed:
        entry["ok"] = False
    if report.when == "call":
        entry["details"].extend(f"{k}={v}" for k, v in item.user_properties)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        entry = _ACCEPTANCE[number]
        status = "PASS" if entry["ok"] else "FAIL"
        detail = "; ".join(entry["details"])
        line = f"criterion {number:>2} {status}  {entry['title']}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
