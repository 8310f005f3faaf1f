import pytest

from relaysec.geometry import FourNodeLayout, Point2D, distances_from_layout

FIG2_RELAY = (0.4551, -0.0987)


@pytest.fixture
def fig2_layout():
    return FourNodeLayout(Point2D(0, 0), Point2D(*FIG2_RELAY), Point2D(1, 0), Point2D(0, 1))


@pytest.fixture
def fig2_dist(fig2_layout):
    return distances_from_layout(fig2_layout)




def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
