"""Shared test configuration: hypothesis profile and acceptance reporting."""

import hypothesis

import serialt

hypothesis.settings.register_profile(
    "serialt", deadline=None, max_examples=60, derandomize=True
)
hypothesis.settings.load_profile("serialt")

# Library classes whose names start with Test are not test containers.
for _cls in (serialt.TestKind, serialt.TestMethod, serialt.TestFlag, serialt.TestResult):
    _cls.__test__ = False

_acceptance_results: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    _acceptance_results[report.nodeid] = (report.outcome, "")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_acceptance_results):
        outcome, _ = _acceptance_results[nodeid]
        label = nodeid.split("::")[-1]
        status = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"{status:>6}  {label}")
