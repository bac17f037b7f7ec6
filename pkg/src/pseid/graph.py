"""Role-annotated causal DAGs.

A :class:`CausalGraph` holds one exposure ``Z``, one outcome ``Y``, an ordered
set of mediators ``M_p, ..., M_1`` (``M_1`` nearest the outcome), baseline
confounders ``C``, exposure-induced confounders ``V`` and parentless latent
common causes.  Graphs are immutable once validated.

Expanded graphs (used for separable effects) replace the exposure by
exposure components and are validated with ``expanded=True``, which relaxes
the single-exposure and mediator-order rules.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import GraphValidationError, UnknownNodeError


class Role(str, enum.Enum):
    EXPOSURE = "exposure"
    MEDIATOR = "mediator"
    OUTCOME = "outcome"
    BASELINE = "baseline"
    CONFOUNDER = "confounder"
    LATENT = "latent"
    COMPONENT = "component"


@dataclass(frozen=True)
class NodeSpec:
    name: str
    role: Role
    domain: tuple = (0, 1)
    order: int | None = None
    observed: bool = True
    component_of: str | None = None
    label: str | None = None

    @property
    def is_latent(self) -> bool:
        return self.role is Role.LATENT


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class DirectedPath:
    nodes: tuple

    def __str__(self) -> str:
        return "->".join(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def label(self, g: "CausalGraph") -> str:
        """Binary path label; leftmost bit is the highest-index mediator."""
        return mediator_bits(g, set(self.nodes))


@dataclass(frozen=True)
class CausalGraph:
    nodes: tuple
    edges: tuple
    expanded: bool = False
    _index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {n.name: n for n in self.nodes})

    def __contains__(self, name) -> bool:
        return name in self._index

    @property
    def names(self) -> tuple:
        return tuple(n.name for n in self.nodes)

    def node(self, name: str) -> NodeSpec:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownNodeError(f"unknown node {name!r}") from None

    def require(self, names: Iterable[str]) -> None:
        for n in names:
            self.node(n)

    @cached_property
    def nx(self) -> nx.DiGraph:
        G = nx.DiGraph()
        G.add_nodes_from(self.names)
        G.add_edges_from(self.edges)
        return G

    def parents(self, name: str) -> tuple:
        self.node(name)
        return tuple(sorted(self.nx.predecessors(name)))

    def children(self, name: str) -> tuple:
        self.node(name)
        return tuple(sorted(self.nx.successors(name)))

    def ancestors(self, name: str) -> frozenset:
        self.node(name)
        return frozenset(nx.ancestors(self.nx, name))

    def descendants(self, name: str) -> frozenset:
        self.node(name)
        return frozenset(nx.descendants(self.nx, name))

    def with_role(self, role: Role) -> tuple:
        return tuple(n.name for n in self.nodes if n.role is role)

    @property
    def exposure(self) -> str | None:
        found = self.with_role(Role.EXPOSURE)
        return found[0] if found else None

    @property
    def outcome(self) -> str:
        return self.with_role(Role.OUTCOME)[0]

    @property
    def baseline(self) -> tuple:
        return self.with_role(Role.BASELINE)

    @property
    def confounders(self) -> tuple:
        return self.with_role(Role.CONFOUNDER)

    @property
    def latents(self) -> tuple:
        return self.with_role(Role.LATENT)

    @property
    def components(self) -> tuple:
        return self.with_role(Role.COMPONENT)

    @cached_property
    def mediators(self) -> dict:
        """Map order index j to mediator name, for original (unexpanded) graphs."""
        out = {}
        for n in self.nodes:
            if n.role is Role.MEDIATOR and n.component_of is None:
                out[n.order] = n.name
        return dict(sorted(out.items()))

    @property
    def p(self) -> int:
        return len(self.mediators)

    def mediator_order(self, name: str) -> int | None:
        n = self.node(name)
        return n.order if n.role is Role.MEDIATOR else None

    def domain(self, name: str) -> tuple:
        return self.node(name).domain

    @cached_property
    def topo(self) -> tuple:
        return tuple(nx.lexicographical_topological_sort(self.nx, key=str))

    def replace(self, nodes=None, edges=None, expanded=None) -> "CausalGraph":
        return validate_graph(
            self.nodes if nodes is None else nodes,
            self.edges if edges is None else edges,
            expanded=self.expanded if expanded is None else expanded,
        )


def mediator_bits(g: CausalGraph, members: set) -> str:
    """Binary string over mediators M_p..M_1 marking membership."""
    meds = g.mediators
    return "".join("1" if meds[j] in members else "0" for j in sorted(meds, reverse=True))


def _coerce_node(raw) -> NodeSpec:
    if isinstance(raw, NodeSpec):
        return raw
    if isinstance(raw, Mapping):
        d = dict(raw)
        d["role"] = Role(d["role"])
        if "domain" in d:
            d["domain"] = tuple(d["domain"])
        return NodeSpec(**d)
    raise TypeError(f"cannot build a node from {raw!r}")


def validate_graph(
    raw_nodes: Iterable, raw_edges: Iterable[Sequence[str]], expanded: bool = False
) -> CausalGraph:
    """Check all graph invariants and return an immutable :class:`CausalGraph`.

    Raises :class:`GraphValidationError` carrying every violation found.
    """
    nodes = [_coerce_node(n) for n in raw_nodes]
    edges = sorted({(str(a), str(b)) for a, b in raw_edges})
    bad = []

    seen = {}
    for n in nodes:
        if n.name in seen:
            bad.append(Violation("DuplicateName", f"node {n.name!r} declared twice"))
        seen[n.name] = n
        if n.role is Role.LATENT:
            if len(n.domain) < 1:
                bad.append(Violation("BadDomain", f"latent {n.name!r} has an empty domain"))
        elif len(n.domain) < 2:
            bad.append(Violation("BadDomain", f"{n.name!r} needs at least two values"))
        if len(set(n.domain)) != len(n.domain):
            bad.append(Violation("BadDomain", f"{n.name!r} has repeated domain values"))
        if n.role is Role.MEDIATOR and (n.order is None or n.order < 1):
            bad.append(Violation("BadMediatorOrder", f"mediator {n.name!r} needs order >= 1"))
    for a, b in edges:
        for x in (a, b):
            if x not in seen:
                bad.append(Violation("UnknownNode", f"edge {a}->{b} uses unknown node {x!r}"))
        if a == b:
            bad.append(Violation("Cycle", f"self loop on {a!r}"))
    if bad:
        raise GraphValidationError(bad)

    G = nx.DiGraph()
    G.add_nodes_from(seen)
    G.add_edges_from(edges)
    if not nx.is_directed_acyclic_graph(G):
        cyc = nx.find_cycle(G)
        bad.append(Violation("Cycle", "cycle " + "->".join([e[0] for e in cyc] + [cyc[0][0]])))
        raise GraphValidationError(bad)

    by_role = {}
    for n in nodes:
        by_role.setdefault(n.role, []).append(n.name)
    outs = by_role.get(Role.OUTCOME, [])
    exps = by_role.get(Role.EXPOSURE, [])
    if len(outs) != 1:
        code = "MissingOutcome" if not outs else "MultipleOutcomes"
        bad.append(Violation(code, f"need exactly one outcome, found {len(outs)}"))
    if expanded:
        if len(exps) > 1:
            bad.append(Violation("MultipleExposures", "at most one detached exposure allowed"))
        if not by_role.get(Role.COMPONENT):
            bad.append(Violation("MissingExposure", "expanded graph has no exposure components"))
    elif len(exps) != 1:
        code = "MissingExposure" if not exps else "MultipleExposures"
        bad.append(Violation(code, f"need exactly one exposure, found {len(exps)}"))
    for name in by_role.get(Role.COMPONENT, []):
        if not expanded:
            bad.append(Violation("UnexpectedComponent", f"{name!r} is a component outside an expanded graph"))
    for name in by_role.get(Role.LATENT, []):
        if any(True for _ in G.predecessors(name)):
            bad.append(Violation("LatentWithParents", f"latent {name!r} has parents"))
    if bad:
        raise GraphValidationError(bad)

    if not expanded:
        z, y = exps[0], outs[0]
        desc_z = nx.descendants(G, z)
        anc_y = nx.ancestors(G, y)
        meds = {}
        for n in nodes:
            if n.role is not Role.MEDIATOR:
                continue
            if n.order in meds:
                bad.append(Violation("BadMediatorOrder", f"order {n.order} used by {meds[n.order]!r} and {n.name!r}"))
            meds[n.order] = n.name
            if n.name not in desc_z or n.name not in anc_y:
                bad.append(Violation("MediatorOffPath", f"mediator {n.name!r} is not on a directed {z}->{y} path"))
        if meds and sorted(meds) != list(range(1, len(meds) + 1)):
            bad.append(Violation("BadMediatorOrder", f"mediator orders {sorted(meds)} are not 1..{len(meds)}"))
        for j, mj in meds.items():
            for k, mk in meds.items():
                if j < k and mk in nx.descendants(G, mj):
                    bad.append(Violation("BadMediatorOrder", f"{mj!r} (order {j}) precedes {mk!r} (order {k})"))
        for name in by_role.get(Role.BASELINE, []):
            if name in desc_z:
                bad.append(Violation("BaselineAfterExposure", f"baseline {name!r} is a descendant of {z!r}"))
        for name in by_role.get(Role.CONFOUNDER, []):
            if name not in desc_z:
                bad.append(Violation("ConfounderNotInduced", f"confounder {name!r} is not a descendant of {z!r}"))
        if z in nx.descendants(G, y):
            bad.append(Violation("Cycle", "outcome precedes exposure"))
    if bad:
        raise GraphValidationError(bad)

    return CausalGraph(tuple(sorted(nodes, key=lambda n: n.name)), tuple(edges), expanded)


def d_separated(g: CausalGraph, a: Iterable[str], b: Iterable[str], c: Iterable[str] = ()) -> bool:
    """True iff every path between ``a`` and ``b`` is blocked given ``c``."""
    a, b, c = set(a), set(b), set(c)
    g.require(a | b | c)
    if a & b or a & c or b & c:
        raise ValueError("d-separation query sets must be disjoint")
    return dag_d_separated(g.nx, a, b, c)


def dag_d_separated(G: nx.DiGraph, a: set, b: set, c: set) -> bool:
    if not a or not b:
        return True
    return nx.is_d_separator(G, set(a), set(b), set(c))


def causal_paths(g: CausalGraph, source: str, target: str) -> list:
    """All directed paths from ``source`` to ``target`` in lexicographic order."""
    g.require([source, target])
    if source == target:
        return [DirectedPath((source,))]
    paths = (tuple(p) for p in nx.all_simple_paths(g.nx, source, target))
    return [DirectedPath(p) for p in sorted(paths)]


def topological_order(g: CausalGraph) -> tuple:
    return g.topo
