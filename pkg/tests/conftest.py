import pytest

from cachemc.model import AccessGraph, CacheConfig, MemoryBlock, parse_program

FIG1 = """\
cache ways=4 sets=1 line=16 inst=4
entry n1
node n1 a
node n2 b
node n3 c
node n4 d
node n5 b
node n6 a
edge n1 n2
edge n2 n3
edge n3 n4
edge n4 n5
edge n5 n6
edge n1 n5
"""

A, B, C, D, E = (MemoryBlock(x) for x in "abcde")


@pytest.fixture
def fig1():
    return parse_program(FIG1)


@pytest.fixture
def diamond():
    """a, then either b c (evicts a with two ways) or b, then b, then a."""
    nodes = {"n1": (A,), "n2": (B, C), "n3": (B,), "n4": (B,), "n5": (A,)}
    edges = (("n1", "n2"), ("n1", "n3"), ("n2", "n4"), ("n3", "n4"), ("n4", "n5"))
    return AccessGraph(nodes, edges, "n1"), CacheConfig(ways=2)


_criteria: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = ""
    if report.failed:
        detail = str(call.excinfo.value).splitlines()[0] if call.excinfo else ""
    _criteria[number] = ("PASS" if report.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title, detail = _criteria[number]
        line = f"criterion {number}: {status}  {title}"
        terminalreporter.write_line(line + (f"  -- {detail}" if detail else ""))
