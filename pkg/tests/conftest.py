import pytest

from stepramsey import basegen
from stepramsey.core import BinaryStepUp, ExplicitLeaf, MixedStepUp, PairColoring

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def k4_base():
    """2-coloring of K4's edges without a monochromatic triangle."""
    return basegen.generate(basegen.GenSpec("pair", 4, 2, 3, 2, seed=7))


@pytest.fixture(scope="session")
def k4_lift(k4_base):
    return BinaryStepUp(k4_base)


@pytest.fixture(scope="session")
def rainbow3():
    return PairColoring(3, 3, [0, 1, 2])


@pytest.fixture(scope="session")
def leaf5():
    """3-coloring of the triples of 5 vertices; every 4-subset shows 3 colors."""
    return basegen.generate(basegen.GenSpec("triple", 5, 3, 4, 3, seed=11))


@pytest.fixture(scope="session")
def mixed125(rainbow3, leaf5):
    return MixedStepUp(rainbow3, ExplicitLeaf(leaf5))
