import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseid.dsl import bundled_specs, parse_file, parse_spec, serialize
from pseid.errors import SpecSemanticError, SpecSyntaxError
from pseid.graph import Role

HEADER = "node Z role=exposure domain={0,1}\nnode Y role=outcome domain={0,1}\nedge Z -> Y\n"


@pytest.mark.parametrize("name", sorted(bundled_specs()))
def test_bundled_specs_round_trip(name):
    doc = parse_file(bundled_specs()[name])
    text = serialize(doc)
    again = parse_spec(text)
    assert again == doc
    assert serialize(again) == text
    assert doc.graph is not None and doc.sem is not None


def test_two_mediator_spec_has_two_mediators():
    doc = parse_file(bundled_specs()["fig3"])
    assert doc.graph.p == 2
    assert len(doc.queries) == 6


def test_pre_expanded_spec():
    doc = parse_file(bundled_specs()["fig10"])
    assert doc.is_expanded
    assert {doc.graph.node(c).label for c in doc.graph.components} == {"00", "01", "10", "11"}


def test_four_node_spec_parses():
    doc = parse_file(bundled_specs()["fig12"])
    assert doc.graph.exposure == "A" and doc.graph.outcome == "C"
    assert doc.graph.node("T").role is Role.MEDIATOR


@pytest.mark.parametrize("text", ["", "# only a comment\n", "\n\n"])
def test_empty_document_lacks_an_exposure(text):
    with pytest.raises(SpecSemanticError) as exc:
        parse_spec(text).graph
    assert exc.value.kind == "MissingExposure"
    assert (exc.value.line, exc.value.col) == (1, 1)


@pytest.mark.parametrize(
    "text, pos, needle",
    [
        ("nod Z role=exposure domain={0,1}\n", (1, 1), "unknown statement"),
        ("node Z role=exposur domain={0,1}\n", (1, 8), "unknown role"),
        ("node Z role=exposure domain={0,1\n", (1, 29), "unclosed"),
        (HEADER + "edge Z -> )\n", (4, 11), "unexpected character"),
        (HEADER + "query classical sideways labels={1}\n", (4, 17), "unknown approach"),
    ],
)
def test_syntax_errors_carry_positions(text, pos, needle):
    with pytest.raises(SpecSyntaxError) as exc:
        parse_spec(text)
    assert (exc.value.line, exc.value.col) == pos
    assert needle in str(exc.value)
    assert str(exc.value).startswith(f"{pos[0]}:{pos[1]}: SyntaxError")


@pytest.mark.parametrize(
    "extra, kind, line",
    [
        ("node Z role=outcome domain={0,1}\n", "DuplicateName", 4),
        ("edge Z -> Q\n", "UnknownNode", 4),
        ("cpt Z dist={0.5,0.6}\ncpt Y table{Z: 0 -> 0.5 0.5; 1 -> 0.5 0.5}\n", "BadDistribution", 4),
        ("cpt Z dist={0.5,0.5}\ncpt Y table{Z: 0 -> 0.5 0.5}\n", "BadTable", 5),
        ("noise Z dist={0.5,0.5}\nmech Z table{u: 0 -> 0; 1 -> 1}\nnoise Y dist={1}\nmech Y table{Z u: 0 0 -> 0}\n",
         "BadTable", 7),
    ],
)
def test_semantic_errors_carry_kind_and_position(extra, kind, line):
    with pytest.raises(SpecSemanticError) as exc:
        doc = parse_spec(HEADER + extra)
        doc.graph, doc.sem
    assert exc.value.kind == kind
    assert exc.value.line == line


def test_labels_keep_leading_zeros():
    doc = parse_file(bundled_specs()["fig10"])
    assert [lbl for lbl, _ in doc.queries[0].labels] == ["00", "01", "10", "11"]


def test_spec_without_sem():
    doc = parse_spec(HEADER)
    assert not doc.has_sem and doc.sem is None


probs = st.integers(1, 99).map(lambda k: (round(k / 100, 2), round(1 - k / 100, 2)))


@settings(max_examples=60, deadline=None)
@given(
    pz=probs,
    pm=st.lists(probs, min_size=2, max_size=2),
    py=st.lists(probs, min_size=4, max_size=4),
    shared=st.booleans(),
    labels=st.lists(st.integers(0, 1), min_size=2, max_size=2),
    target=st.sampled_from([None, 0, 1]),
)
def test_round_trip_property(pz, pm, py, shared, labels, target):
    mode = " mode=shared" if shared else ""
    rows_m = "; ".join(f"{z} -> {a} {b}" for z, (a, b) in enumerate(pm))
    rows_y = "; ".join(f"{m} {z} -> {a} {b}" for (m, z), (a, b) in zip([(0, 0), (0, 1), (1, 0), (1, 1)], py))
    text = (
        "node Z role=exposure domain={0,1}\nnode M role=mediator order=1 domain={0,1}\n"
        "node Y role=outcome domain={0,1}\nedge Z -> M -> Y\nedge Z -> Y\n"
        f"cpt Z dist={{{pz[0]},{pz[1]}}}\ncpt M{mode} table{{Z: {rows_m}}}\ncpt Y table{{M Z: {rows_y}}}\n"
        f"query classical node labels={{{labels[0]},{labels[1]}}}"
        + (f" target={target}" if target is not None else "") + "\n"
    )
    doc = parse_spec(text)
    assert parse_spec(serialize(doc)) == doc
    assert doc.sem.mechanisms["M"].mode.value == ("shared" if shared else "fresh")
