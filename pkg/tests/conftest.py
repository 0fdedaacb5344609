import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA: dict[str, dict] = {}


@pytest.fixture
def criterion(request):
    """Record measured values of an acceptance criterion for the summary."""
    info = {"label": request.node.function.__doc__.strip().splitlines()[0], "values": {}}
    _CRITERIA[request.node.nodeid] = info
    return info["values"]


def pytest_runtest_logreport(report):
    if report.nodeid in _CRITERIA and (report.when == "call" or report.outcome != "passed"):
        _CRITERIA[report.nodeid]["outcome"] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for info in _CRITERIA.values():
        status = "PASS" if info.get("outcome") == "passed" else "FAIL"
        vals = ", ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}"
                         for k, v in info["values"].items())
        terminalreporter.write_line(f"{status}  {info['label']}" + (f"  [{vals}]" if vals else ""))
