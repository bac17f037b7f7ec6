import pytest

from pseid.errors import NotAConfounderError
from pseid.expansion import (
    dismissible_conditions,
    expand_confounder,
    expand_node_intervened,
    expand_path_intervened,
)
from pseid.graph import Role


def test_node_expansion_has_one_component_per_label(g2):
    eg = expand_node_intervened(g2)
    assert eg.labels == ("0", "1", "2")
    assert eg.attribution == {"Z0": "Y", "Z1": "M1", "Z2": "M2"}
    assert "Z" not in eg.graph
    assert set(eg.graph.parents("Y")) == {"C", "M1", "M2", "Z0"}
    assert all(eg.graph.node(c).role is Role.COMPONENT for c in eg.graph.components)


def test_path_expansion_splits_the_shared_mediator(g2):
    eg = expand_path_intervened(g2)
    assert eg.labels == ("00", "01", "10", "11")
    assert {"M2_10", "M2_11"} <= set(eg.graph.names)
    assert eg.original_name("M2_10") == "M2"
    assert set(eg.split_nodes()) == {"M2"}


def test_dismissible_conditions_hold_on_clean_expansions(g2):
    for eg in (expand_node_intervened(g2), expand_path_intervened(g2)):
        conds = dismissible_conditions(eg)
        assert len(conds) == len(eg.endogenous())
        assert all(c.holds(eg) for c in conds)


def test_reduced_form_drops_component_names(g2):
    eg = expand_node_intervened(g2)
    forms = {c.target: c.reduced_form(eg) for c in dismissible_conditions(eg)}
    assert forms["M2"] == "P(M2(z2)|C)"


def test_confounder_expansion(g2v):
    eg = expand_confounder(g2v, "V")
    assert not eg.sequential
    v_parts = [n for n in eg.graph.names if eg.original_name(n) == "V" and n != "V"]
    assert len(v_parts) >= 2
    seq = expand_confounder(g2v, "V", sequential=True)
    assert seq.sequential
    assert len(seq.graph.edges) > len(eg.graph.edges)


def test_only_confounders_can_be_split(g2v):
    with pytest.raises(NotAConfounderError):
        expand_confounder(g2v, "M1")
