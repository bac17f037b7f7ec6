import pytest

from pseid.errors import ValueOutOfDomainError
from pseid.swig import Sym, check_statement, counterfactual_independencies, fixed, split


def test_split_labels_follow_fixed_ancestors(g2):
    s = split(g2, {"Z": Sym("z"), "M1": Sym("m1"), "M2": Sym("m2")})
    assert str(s.var("Y")) == "Y(m1,m2,z)"
    assert str(s.var("M1")) == "M1(m2,z)"
    assert str(s.var("M2")) == "M2(z)"
    assert str(s.var("C")) == "C"
    assert fixed("Z") in s.graph and not s.graph.in_edges(fixed("Z"))


def test_fixed_half_takes_the_outgoing_edges(g2):
    s = split(g2, {"Z": 1})
    assert ("Z", "M2") not in s.graph.edges
    assert (fixed("Z"), "M2") in s.graph.edges
    assert ("C", "Z") in s.graph.edges


def test_exchangeability_read_off_the_swig(g2):
    s = split(g2, {"Z": Sym("z"), "M1": Sym("m1"), "M2": Sym("m2")})
    stmts = {str(x) for x in counterfactual_independencies(s)}
    assert "Y(m1,m2,z) _||_ Z | C" in stmts
    assert "M2(z) _||_ Z | C" in stmts


def test_unobserved_confounding_breaks_exchangeability(g2):
    s = split(g2, {"Z": Sym("z")})
    assert check_statement(s, "Y", "Z", ["C"])
    assert not check_statement(s, "Y", "Z", [])


def test_split_is_incremental(g2):
    s = split(g2, {"Z": Sym("z")}).split({"M2": Sym("m2")})
    assert s.intervened == split(g2, {"Z": Sym("z"), "M2": Sym("m2")}).intervened
    with pytest.raises(ValueError):
        s.split({"Z": 0})


def test_concrete_values_are_checked(g2):
    with pytest.raises(ValueOutOfDomainError):
        split(g2, {"Z": 7})
