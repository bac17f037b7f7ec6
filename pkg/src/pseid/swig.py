"""Single-world intervention graphs built by node splitting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import networkx as nx

from .counterfactual import Const, Term
from .errors import UnknownNodeError, ValueOutOfDomainError
from .graph import CausalGraph, Role, dag_d_separated


@dataclass(frozen=True)
class Sym:
    """Symbolic intervention value, e.g. ``z0`` or ``m1``."""

    name: str

    def __str__(self) -> str:
        return self.name


def fixed(name: str) -> str:
    return f"{name}*"


@dataclass(frozen=True)
class LabeledVar:
    name: str
    labels: tuple = ()

    def __str__(self) -> str:
        if not self.labels:
            return self.name
        vals = ",".join(_render_value(n, v) for n, v in self.labels)
        return f"{self.name}({vals})"

    def term(self, values: Mapping[str, object] | None = None) -> Term:
        values = values or {}
        items = []
        for node, v in self.labels:
            label = str(v) if isinstance(v, Sym) else node.lower()
            val = values.get(label, values.get(node, v))
            items.append((node, Const(val, label)))
        return Term(self.name, tuple(items))


def _render_value(node, v) -> str:
    return str(v) if isinstance(v, Sym) else f"{node.lower()}={v}"


@dataclass(frozen=True)
class IndependenceStatement:
    left: tuple
    right: tuple
    given: tuple = ()

    def __post_init__(self):
        names = [x for part in (self.left, self.right, self.given) for x in part]
        if len(set(names)) != len(names):
            raise ValueError("independence statement sets must be disjoint")

    def __str__(self) -> str:
        lhs = ",".join(map(str, self.left))
        rhs = ",".join(map(str, self.right))
        s = f"{lhs} _||_ {rhs}"
        if self.given:
            s += " | " + ",".join(map(str, self.given))
        return s


@dataclass(frozen=True)
class Swig:
    base: CausalGraph
    interventions: tuple
    graph: nx.DiGraph
    split_nodes: tuple
    labels: tuple

    @property
    def intervened(self) -> dict:
        return dict(self.interventions)

    def label_of(self, name: str) -> tuple:
        return dict(self.labels).get(name, ())

    def var(self, name: str) -> LabeledVar:
        return LabeledVar(name, self.label_of(name))

    def edges(self) -> set:
        return set(self.graph.edges)

    def split(self, more: Mapping[str, object]) -> "Swig":
        """Split additional nodes of this SWIG (disjoint from those already split)."""
        overlap = set(more) & set(self.intervened)
        if overlap:
            raise ValueError(f"nodes already split: {sorted(overlap)}")
        merged = dict(self.interventions)
        merged.update(more)
        return split(self.base, merged)

    def d_separated(self, a, b, c=()) -> bool:
        return dag_d_separated(self.graph, set(a), set(b), set(c))


def split(g: CausalGraph, interventions: Mapping[str, object]) -> Swig:
    """Split each intervened node into a random half and a parentless fixed half."""
    for node, val in interventions.items():
        spec = g.node(node)
        if not isinstance(val, Sym) and val not in spec.domain:
            raise ValueOutOfDomainError(f"{val!r} not in domain of {node}")
    G = nx.DiGraph()
    G.add_nodes_from(g.names)
    for a, b in g.edges:
        src = fixed(a) if a in interventions else a
        G.add_edge(src, b)
    for node in interventions:
        G.add_node(fixed(node))
    labels = {}
    for name in g.names:
        anc = nx.ancestors(G, name)
        lab = tuple(sorted((x, interventions[x]) for x in interventions if fixed(x) in anc))
        if lab:
            labels[name] = lab
    pairs = tuple(sorted((n, (n, fixed(n))) for n in interventions))
    return Swig(g, tuple(sorted(interventions.items())), G, pairs, tuple(sorted(labels.items())))


def _observed(g: CausalGraph, name: str) -> bool:
    spec = g.node(name)
    return spec.role is not Role.LATENT and spec.observed


def counterfactual_independencies(s: Swig) -> list:
    """Exchangeability statements readable off a SWIG by d-separation.

    For every intervened node ``A`` (its random half plays the actual-world
    term) and every counterfactual random half ``X`` of the outcome, a
    mediator or a confounder, emit ``X _||_ A | history(A)`` when it holds.
    The history is the set of observed random halves that are ancestors of
    ``A`` in the split graph.  Conditioning never uses fixed halves.
    """
    g = s.base
    out = []
    if not s.interventions:
        return out
    targets = [
        n for n in g.names
        if s.label_of(n) and g.node(n).role in (Role.OUTCOME, Role.MEDIATOR, Role.CONFOUNDER)
        and _observed(g, n)
    ]
    for a in sorted(s.intervened):
        anc_a = nx.ancestors(s.graph, a)
        hist = sorted(x for x in anc_a if x in g and _observed(g, x))
        for x in targets:
            if x == a or x in anc_a or x in hist:
                continue
            if s.d_separated({x}, {a}, set(hist)):
                out.append(
                    IndependenceStatement(
                        (s.var(x),), (s.var(a),), tuple(s.var(h) for h in hist)
                    )
                )
    out.sort(key=str)
    return out


def check_statement(s: Swig, x: str, a: str, given=()) -> bool:
    """d-separation of random halves ``x`` and ``a`` given random halves ``given``."""
    for n in [x, a, *given]:
        if n not in s.base:
            raise UnknownNodeError(n)
    return s.d_separated({x}, {a}, set(given))
