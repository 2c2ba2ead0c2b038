import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(label): acceptance criterion printed as a PASS/FAIL line"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and report.when == "call":
        verdict = "PASS" if report.passed else "FAIL"
        report._acceptance = f"ACCEPTANCE {marker.args[0]}: {verdict}"


def pytest_runtest_logreport(report):
    # Runs outside capture, so the line reaches the real terminal (and tee).
    line = getattr(report, "_acceptance", None)
    if line is not None:
        print(f"\n{line}", flush=True)
