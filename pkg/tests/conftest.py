import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the numba kernels once so timed checks measure steady-state cost."""
    from qkramers.bath import Drude
    from qkramers.dynamics import barrier_dynamics, c_functions
    from qkramers.matsubara import build_table, lambda_cap

    lambda_cap(build_table(Drude(1.0, 10.0), 1.0, 200))
    c_functions(barrier_dynamics(Drude(1.0, 10.0), 1.0, 200), 0.5)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    _CRITERIA[props["criterion"]] = (props.get("title", ""), report.passed, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[number]
        line = f"AC{number:02d} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(autouse=True)
def _tag_criterion(request, record_property):
    marker = request.node.get_closest_marker("criterion")
    if marker is not None:
        number, title = marker.args
        record_property("criterion", number)
        record_property("title", title)
