"""Expanded DAGs with manipulable exposure (and confounder/mediator) components."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotAConfounderError, UnsupportedCombinationError
from .graph import CausalGraph, DirectedPath, NodeSpec, Role, dag_d_separated, validate_graph
from .regime import (
    Approach,
    InterventionRegime,
    mediator_parents,
    node_labels,
    path_labels,
    regime_from_values,
    uniform_regime,
)

__all__ = [
    "Approach",
    "InterventionRegime",
    "ExpandedGraph",
    "DismissibleCondition",
    "expand_node_intervened",
    "expand_path_intervened",
    "expand_confounder",
    "dismissible_conditions",
    "from_graph",
    "regime_from_values",
    "uniform_regime",
]


@dataclass(frozen=True)
class ExpandedGraph:
    """An expanded DAG plus the bookkeeping that ties it to the original graph.

    ``source_of[(x, p)]`` names the expanded node that plays original parent
    ``p`` for expanded node ``x``.  ``governs[x]`` is the exposure-component
    label of ``x``.
    """

    graph: CausalGraph
    detached: NodeSpec
    approach: Approach
    component_of: dict
    attribution: dict
    governs: dict
    source_of: dict = field(default_factory=dict)
    original: CausalGraph | None = None
    sequential: bool = False

    @property
    def exposure_components(self) -> tuple:
        return self.graph.components

    def component(self, label: str) -> str:
        for c in self.graph.components:
            if self.graph.node(c).label == label:
                return c
        raise KeyError(label)

    @property
    def labels(self) -> tuple:
        return tuple(sorted(self.graph.node(c).label for c in self.graph.components))

    def endogenous(self) -> tuple:
        """Non-component variables downstream of the exposure components."""
        skip = (Role.COMPONENT, Role.LATENT, Role.BASELINE, Role.EXPOSURE)
        return tuple(n for n in self.graph.topo if self.graph.node(n).role not in skip)

    def original_name(self, name: str) -> str:
        return self.component_of.get(name, name)

    def split_nodes(self) -> dict:
        """Original node -> its expanded components, for decomposed non-exposure nodes."""
        out: dict = {}
        z = self.detached.name
        for comp, orig in sorted(self.component_of.items()):
            if orig != z:
                out.setdefault(orig, []).append(comp)
        return {k: tuple(v) for k, v in out.items()}


def _component_spec(z: NodeSpec, label: str) -> NodeSpec:
    return NodeSpec(f"{z.name}{label}", Role.COMPONENT, z.domain, None, True, z.name, label)


def _check_names(g: CausalGraph, names) -> None:
    clash = sorted(set(names) & set(g.names))
    if clash:
        raise UnsupportedCombinationError(f"expanded node names clash with existing nodes: {clash}")


def expand_node_intervened(g: CausalGraph, sequential: bool = False, split=None) -> ExpandedGraph:
    """Replace the exposure by components ``Z0..Zp`` (``Z0 -> Y``, ``Zj -> Mj``).

    Exposure-induced confounders in ``split`` (default: all of them) become
    one component per exposure-component label they influence; component
    ``Vj`` receives ``Zj`` and feeds every child of ``V``.  ``sequential``
    adds ``Vk -> Vj`` for ``k > j``.
    """
    z = g.exposure
    zspec = g.node(z)
    labels = node_labels(g.p)
    order = {name: j for j, name in g.mediators.items()}
    gov = {g.outcome: "0", **{m: str(j) for m, j in order.items()}}
    split = tuple(g.confounders) if split is None else tuple(split)
    left = [v for v in g.confounders if v not in split]
    if left:
        raise UnsupportedCombinationError(f"confounders {left} must be split together")

    comps = {lbl: _component_spec(zspec, lbl) for lbl in labels}
    vsplit = {}
    for v in split:
        bad = [p for p in g.parents(v) if g.node(p).role in (Role.MEDIATOR, Role.CONFOUNDER, Role.OUTCOME)]
        if bad:
            raise UnsupportedCombinationError(
                f"confounder {v!r} has endogenous parents {bad}; only exposure, baseline and latent parents are supported"
            )
        kids = g.children(v)
        if any(k not in gov for k in kids):
            raise UnsupportedCombinationError(f"confounder {v!r} feeds a node without an exposure label")
        vsplit[v] = sorted({gov[k] for k in kids}, key=int)
    new_names = [c.name for c in comps.values()] + [f"{v}{j}" for v, js in vsplit.items() for j in js]
    _check_names(g, new_names)

    nodes = [n for n in g.nodes if n.name != z and n.name not in vsplit]
    nodes += list(comps.values())
    component_of = {c.name: z for c in comps.values()}
    governs = dict(gov)
    attribution = {comps["0"].name: g.outcome}
    for m, j in order.items():
        attribution[comps[str(j)].name] = m
    source_of: dict = {}
    edges = []

    for v, js in vsplit.items():
        vs = g.node(v)
        for j in js:
            name = f"{v}{j}"
            nodes.append(NodeSpec(name, Role.CONFOUNDER, vs.domain, None, vs.observed, v, j))
            component_of[name] = v
            governs[name] = j
            attribution[name] = tuple(k for k in g.children(v) if gov[k] == j)
            for p in g.parents(v):
                src = comps[j].name if p == z else p
                edges.append((src, name))
                source_of[(name, p)] = src
            for k in g.children(v):
                edges.append((name, k))
                if gov[k] == j:
                    source_of[(k, v)] = name
            if sequential:
                for k in js:
                    if int(k) > int(j):
                        edges.append((f"{v}{k}", name))

    for p in g.parents(z):
        for c in comps.values():
            edges.append((p, c.name))
    for a, b in g.edges:
        if z in (a, b) or a in vsplit or b in vsplit:
            continue
        edges.append((a, b))
    for x, lbl in gov.items():
        edges.append((comps[lbl].name, x))
        source_of[(x, z)] = comps[lbl].name

    eg = validate_graph(nodes, edges, expanded=True)
    return ExpandedGraph(eg, zspec, Approach.NODE, component_of, attribution, governs, source_of, g, sequential)


def expand_confounder(g: CausalGraph, v: str, sequential: bool = False) -> ExpandedGraph:
    """Node-intervened expansion that additionally splits confounder ``v``."""
    if g.node(v).role is not Role.CONFOUNDER:
        raise NotAConfounderError(f"{v!r} is not an exposure-induced confounder")
    return expand_node_intervened(g, sequential=sequential, split=(v,))


def expand_path_intervened(g: CausalGraph) -> ExpandedGraph:
    """One exposure component per exposure->outcome path bundle.

    A mediator reached along several bundles is split into ``M_bits``
    components, one per bundle, each keeping the original in-edges.
    """
    if g.confounders:
        raise UnsupportedCombinationError(
            "path-intervened expansion with exposure-induced confounders is not defined; "
            "use the node-intervened approach or remove the confounder"
        )
    z = g.exposure
    zspec = g.node(z)
    order = {name: j for j, name in g.mediators.items()}

    def bits(down: frozenset) -> str:
        return "".join("1" if j in down else "0" for j in sorted(g.mediators, reverse=True))

    # enumerate term instances (node, set of mediators between it and Y)
    instances: list = []
    seen = set()

    def visit(x: str, down: frozenset, chain: tuple):
        key = (x, down)
        if key not in seen:
            seen.add(key)
            instances.append((x, down, chain))
        for m in mediator_parents(g, x):
            visit(m, down | {order[m]}, (m,) + chain)

    visit(g.outcome, frozenset(), (g.outcome,))
    per_node: dict = {}
    for x, down, _ in instances:
        per_node.setdefault(x, []).append(down)

    def inst_name(x: str, down: frozenset) -> str:
        return x if len(per_node[x]) == 1 else f"{x}_{bits(down)}"

    nodes = [n for n in g.nodes if n.name != z and n.name not in per_node]
    component_of: dict = {}
    attribution: dict = {}
    governs: dict = {}
    source_of: dict = {}
    edges = []
    new_names = []
    for x, down, chain in instances:
        lbl = bits(down)
        name = inst_name(x, down)
        cname = f"{z}{lbl}"
        new_names.append(cname)
        spec = g.node(x)
        if len(per_node[x]) > 1:
            new_names.append(name)
            nodes.append(NodeSpec(name, spec.role, spec.domain, spec.order, spec.observed, x, lbl))
            component_of[name] = x
        else:
            nodes.append(spec)
        nodes.append(_component_spec(zspec, lbl))
        component_of[cname] = z
        attribution[cname] = DirectedPath((z,) + chain)
        governs[name] = lbl
        edges.append((cname, name))
        source_of[(name, z)] = cname
        for p in g.parents(x):
            if p == z:
                continue
            if p in order:
                src = inst_name(p, down | {order[p]})
            else:
                src = p
            edges.append((src, name))
            source_of[(name, p)] = src
        for p in g.parents(z):
            edges.append((p, cname))
    _check_names(g, [n for n in new_names if n not in per_node])
    for a, b in g.edges:
        if z in (a, b) or a in per_node or b in per_node:
            continue
        edges.append((a, b))
    eg = validate_graph(nodes, edges, expanded=True)
    return ExpandedGraph(eg, zspec, Approach.PATH, component_of, attribution, governs, source_of, g, False)


def from_graph(eg: CausalGraph, approach=Approach.NODE) -> ExpandedGraph:
    """Wrap a graph that was written down already expanded (component roles)."""
    comps = eg.components
    zname = eg.node(comps[0]).component_of
    if any(eg.node(c).component_of != zname for c in comps):
        raise UnsupportedCombinationError("exposure components must decompose a single exposure")
    zspec = NodeSpec(zname, Role.EXPOSURE, eg.node(comps[0]).domain)
    component_of = {}
    governs = {}
    attribution = {}
    for n in eg.names:
        spec = eg.node(n)
        if spec.component_of:
            component_of[n] = spec.component_of
    for x in eg.topo:
        spec = eg.node(x)
        if spec.role in (Role.COMPONENT, Role.LATENT, Role.BASELINE, Role.EXPOSURE):
            continue
        cps = [p for p in eg.parents(x) if eg.node(p).role is Role.COMPONENT]
        if len(cps) != 1:
            raise UnsupportedCombinationError(
                f"{x!r} must have exactly one exposure-component parent, found {cps}"
            )
        governs[x] = eg.node(cps[0]).label
        attribution.setdefault(cps[0], x)
    sequential = any(
        eg.node(a).component_of and eg.node(a).component_of == eg.node(b).component_of
        and eg.node(a).role is Role.CONFOUNDER
        for a, b in eg.edges
    )
    return ExpandedGraph(eg, zspec, Approach(approach), component_of, attribution, governs, {}, None, sequential)


@dataclass(frozen=True)
class DismissibleCondition:
    target: str
    governing: str
    others: tuple
    given: tuple

    @property
    def statement(self) -> str:
        given = ",".join((self.governing,) + self.given)
        return f"{self.target} _||_ {','.join(self.others)} | {given}"

    def reduced_form(self, eg: ExpandedGraph) -> str:
        lbl = eg.graph.node(self.governing).label
        base = set(eg.graph.baseline)
        cond = ",".join(g if g in base else f"{g}(z{lbl})" for g in self.given)
        inner = f"{self.target}(z{lbl})"
        return f"P({inner}|{cond})" if cond else f"P({inner})"

    def holds(self, eg: ExpandedGraph) -> bool:
        return dag_d_separated(eg.graph.nx, {self.target}, set(self.others), {self.governing, *self.given})


def dismissible_conditions(eg: ExpandedGraph) -> list:
    """One condition per endogenous variable: independence from non-governing components."""
    g = eg.graph
    comps = set(g.components)
    out = []
    for x in eg.endogenous():
        gov = [p for p in g.parents(x) if p in comps]
        if len(gov) != 1:
            raise UnsupportedCombinationError(f"{x!r} has {len(gov)} exposure-component parents")
        given = tuple(
            p for p in g.parents(x) if p not in comps and g.node(p).role is not Role.LATENT
        )
        others = tuple(sorted(comps - {gov[0]}))
        out.append(DismissibleCondition(x, gov[0], others, given))
    return out
