import pytest

from pseid.graph import NodeSpec, Role, validate_graph

TWO_MED_EDGES = [
    ("C", "Z"), ("C", "M2"), ("C", "Y"),
    ("Z", "M2"), ("Z", "M1"), ("Z", "Y"),
    ("M2", "M1"), ("M2", "Y"), ("M1", "Y"),
]


def two_mediator_graph(v: bool = False, v_observed: bool = True):
    """C -> Z -> {M2 -> M1} -> Y, optionally with an exposure-induced confounder V."""
    nodes = [
        NodeSpec("C", Role.BASELINE),
        NodeSpec("Z", Role.EXPOSURE),
        NodeSpec("M2", Role.MEDIATOR, order=2),
        NodeSpec("M1", Role.MEDIATOR, order=1),
        NodeSpec("Y", Role.OUTCOME),
    ]
    edges = list(TWO_MED_EDGES)
    if v:
        nodes.append(NodeSpec("V", Role.CONFOUNDER, observed=v_observed))
        edges += [("C", "V"), ("Z", "V"), ("V", "M2"), ("V", "M1"), ("V", "Y")]
    return validate_graph(nodes, edges)


def one_mediator_graph():
    nodes = [NodeSpec("Z", Role.EXPOSURE), NodeSpec("M", Role.MEDIATOR, order=1), NodeSpec("Y", Role.OUTCOME)]
    return validate_graph(nodes, [("Z", "M"), ("M", "Y"), ("Z", "Y")])


@pytest.fixture
def g2():
    return two_mediator_graph()


@pytest.fixture
def g2v():
    return two_mediator_graph(v=True)


# acceptance lines are collected here and repeated in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
