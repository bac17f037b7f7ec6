import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseid.counterfactual import Term
from pseid.errors import GraphValidationError
from pseid.graph import NodeSpec, Role, causal_paths, d_separated, validate_graph
from pseid.sem import numeric_independence, random_sem

from conftest import two_mediator_graph


def codes(exc):
    return {v.code for v in exc.value.violations}


def test_two_mediator_graph_basics(g2):
    assert g2.exposure == "Z" and g2.outcome == "Y"
    assert g2.p == 2
    assert g2.mediators == {1: "M1", 2: "M2"}
    assert g2.baseline == ("C",)
    assert g2.topo.index("M2") < g2.topo.index("M1")


def test_causal_paths_are_sorted(g2):
    paths = [p.nodes for p in causal_paths(g2, "Z", "Y")]
    assert paths == sorted(paths)
    assert ("Z", "M2", "M1", "Y") in paths
    assert len(paths) == 4


@pytest.mark.parametrize(
    "nodes, edges, code",
    [
        ([NodeSpec("Y", Role.OUTCOME)], [], "MissingExposure"),
        ([NodeSpec("Z", Role.EXPOSURE)], [], "MissingOutcome"),
        ([NodeSpec("Z", Role.EXPOSURE), NodeSpec("Y", Role.OUTCOME)], [("Z", "Y"), ("Y", "Z")], "Cycle"),
        ([NodeSpec("Z", Role.EXPOSURE), NodeSpec("Y", Role.OUTCOME)], [("Z", "Q")], "UnknownNode"),
        ([NodeSpec("Z", Role.EXPOSURE), NodeSpec("Y", Role.OUTCOME), NodeSpec("M", Role.MEDIATOR, order=1)],
         [("Z", "Y")], "MediatorOffPath"),
        ([NodeSpec("Z", Role.EXPOSURE), NodeSpec("Y", Role.OUTCOME), NodeSpec("B", Role.BASELINE)],
         [("Z", "B"), ("B", "Y")], "BaselineAfterExposure"),
        ([NodeSpec("Z", Role.EXPOSURE), NodeSpec("Y", Role.OUTCOME), NodeSpec("V", Role.CONFOUNDER)],
         [("V", "Z"), ("Z", "Y")], "ConfounderNotInduced"),
        ([NodeSpec("Z", Role.EXPOSURE), NodeSpec("Y", Role.OUTCOME), NodeSpec("L", Role.LATENT)],
         [("Z", "L"), ("L", "Y")], "LatentWithParents"),
        ([NodeSpec("Z", Role.EXPOSURE, domain=(0,)), NodeSpec("Y", Role.OUTCOME)], [("Z", "Y")], "BadDomain"),
    ],
)
def test_validation_codes(nodes, edges, code):
    with pytest.raises(GraphValidationError) as exc:
        validate_graph(nodes, edges)
    assert code in codes(exc)


def test_mediator_order_must_follow_the_graph():
    nodes = [NodeSpec("Z", Role.EXPOSURE), NodeSpec("A", Role.MEDIATOR, order=1),
             NodeSpec("B", Role.MEDIATOR, order=2), NodeSpec("Y", Role.OUTCOME)]
    # A -> B means A is further from Y, so A must carry the higher order
    with pytest.raises(GraphValidationError) as exc:
        validate_graph(nodes, [("Z", "A"), ("A", "B"), ("B", "Y")])
    assert "BadMediatorOrder" in codes(exc)


def test_d_separation_textbook_cases(g2):
    assert not d_separated(g2, {"Z"}, {"Y"})
    assert d_separated(g2, {"C"}, {"M1"}, {"Z", "M2"})
    assert not d_separated(g2, {"C"}, {"M1"}, {"Z"})
    with pytest.raises(ValueError):
        d_separated(g2, {"Z"}, {"Z"})


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), v=st.booleans())
def test_d_separation_is_sound_on_random_parameterizations(seed, v):
    g = two_mediator_graph(v=v)
    sem = random_sem(g, seed)
    names = list(g.names)
    for a in names:
        for b in names:
            if a >= b:
                continue
            rest = [x for x in names if x not in (a, b)]
            for given_ in ([], rest[:1], rest[:2]):
                if d_separated(g, {a}, {b}, set(given_)):
                    verdict = numeric_independence(sem, [Term(a)], [Term(b)], [Term(x) for x in given_], tol=1e-12)
                    assert verdict.holds, (a, b, given_, verdict.max_deviation)
