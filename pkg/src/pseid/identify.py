"""Identification formulas for the classical, interventional and separable semantics."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import AssumptionViolatedError, UnsupportedCombinationError
from .expansion import ExpandedGraph, dismissible_conditions
from .formula import Factor, FormulaAst, normalize_formula, render_formula
from .graph import CausalGraph, Role
from .regime import Approach, InterventionRegime, mediator_parents

__all__ = [
    "Semantic",
    "Nuisance",
    "EstimandSpec",
    "identify",
    "identify_classical",
    "identify_interventional",
    "identify_separable",
    "normalize_formula",
    "render_formula",
]


class Semantic(str, enum.Enum):
    CLASSICAL = "classical"
    INTERVENTIONAL = "interventional"
    SEPARABLE = "separable"


class Nuisance(str, enum.Enum):
    ASSUME_ABSENT = "assumeAbsent"
    WEIGHT_OBSERVED = "weightObserved"
    REFUSE = "refuse"


@dataclass(frozen=True)
class EstimandSpec:
    semantic: Semantic
    regime: InterventionRegime
    graph: object  # CausalGraph, or ExpandedGraph for the separable semantic
    target: object = None
    nuisance: Nuisance | None = None
    check_assumptions: bool = True
    form: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "semantic", Semantic(self.semantic))
        if self.nuisance is not None:
            object.__setattr__(self, "nuisance", Nuisance(self.nuisance))
        if self.semantic is Semantic.SEPARABLE:
            if not isinstance(self.graph, ExpandedGraph):
                raise UnsupportedCombinationError("the separable semantic needs an ExpandedGraph")
            if self.graph.approach is not self.regime.approach:
                raise UnsupportedCombinationError(
                    f"regime approach {self.regime.approach.value} does not match the "
                    f"{self.graph.approach.value} expansion"
                )

    @property
    def base_graph(self) -> CausalGraph:
        return self.graph.original if isinstance(self.graph, ExpandedGraph) else self.graph


def _sym(name: str) -> str:
    return name.lower()


def _baseline(g: CausalGraph) -> tuple:
    return tuple(sorted(g.baseline))


def _baseline_factors(g: CausalGraph) -> list:
    out = []
    done: list = []
    for c in (n for n in g.topo if n in set(g.baseline)):
        out.append(Factor(c, _sym(c), tuple((d, _sym(d)) for d in sorted(done))))
        done.append(c)
    return out


def _resolve_nuisance(g: CausalGraph, semantic: Semantic, nuisance: Nuisance | None) -> tuple:
    """Return the confounders that enter the formula."""
    vs = g.confounders
    if not vs:
        return ()
    hidden = [v for v in vs if not g.node(v).observed]
    if nuisance is None:
        nuisance = Nuisance.REFUSE if hidden else Nuisance.WEIGHT_OBSERVED
    if nuisance is Nuisance.ASSUME_ABSENT:
        return ()
    if nuisance is Nuisance.REFUSE and hidden:
        raise AssumptionViolatedError(
            f"unobserved exposure-induced confounders {hidden}; pass nuisance=assumeAbsent to ignore them",
            [],
        )
    if hidden:
        raise AssumptionViolatedError(f"cannot weight by unobserved confounders {hidden}", [])
    for v in vs:
        meds = [p for p in g.parents(v) if g.node(p).role in (Role.MEDIATOR, Role.OUTCOME)]
        if meds:
            raise UnsupportedCombinationError(f"confounder {v!r} descends from mediators {meds}")
    return tuple(vs)


def _check_exchangeability(spec: EstimandSpec) -> None:
    if not spec.check_assumptions:
        return
    from .assumptions import check_exchangeability

    entries = check_exchangeability(spec.graph, spec.regime, spec.semantic)
    bad = [e for e in entries if e.graph_verdict == "fails"]
    if bad:
        raise AssumptionViolatedError(
            "exchangeability fails: " + "; ".join(e.statement for e in bad), bad
        )


class _Builder:
    def __init__(self, g: CausalGraph, regime: InterventionRegime, vs: tuple):
        self.g = g
        self.regime = regime
        self.vs = vs
        self.factors: list = []
        self.sums: list = []
        self.v_done: set = set()
        self.cs = _baseline(g)

    def c_given(self) -> list:
        return [(c, _sym(c)) for c in self.cs]

    def v_instance(self, v: str, lbl: str) -> str:
        sym = f"{_sym(v)}{lbl}"
        if (v, lbl) in self.v_done:
            return sym
        self.v_done.add((v, lbl))
        given = []
        for p in self.g.parents(v):
            if p in self.vs:
                given.append((p, self.v_instance(p, lbl)))
        given += self.c_given()
        self.factors.append(Factor(v, sym, tuple(sorted(set(given))), self.regime.slot(lbl)))
        self.sums.append((sym, v))
        return sym

    def add(self, x: str, sym: str, lbl: str, med_syms: dict, with_v: bool) -> None:
        given = [(m, med_syms[m]) for m in mediator_parents(self.g, x)]
        if with_v:
            for p in self.g.parents(x):
                if p in self.vs:
                    given.append((p, self.v_instance(p, lbl)))
        given += self.c_given()
        self.factors.append(Factor(x, sym, tuple(sorted(set(given))), self.regime.slot(lbl)))
        if x != self.g.outcome:
            self.sums.append((sym, x))

    def ast(self, target, meta: dict) -> FormulaAst:
        factors = self.factors + _baseline_factors(self.g)
        sums = self.sums + [(_sym(c), c) for c in self.cs]
        ast = FormulaAst(
            self.g.outcome, self.g.exposure, tuple(sums), tuple(factors),
            tuple(sorted(self.regime.slots().items())), target, "y", tuple(sorted(meta.items())),
        )
        ast.check()
        return ast


def _node_formula(g: CausalGraph, regime: InterventionRegime, vs: tuple, v_in_mediators: bool, target, meta) -> FormulaAst:
    b = _Builder(g, regime, vs)
    med_syms = {m: _sym(m) for m in g.mediators.values()}
    b.add(g.outcome, "y", "0", med_syms, True)
    for j, m in sorted(g.mediators.items()):
        b.add(m, med_syms[m], str(j), med_syms, v_in_mediators)
    return b.ast(target, meta)


def _path_instances(g: CausalGraph) -> list:
    order = {name: j for j, name in g.mediators.items()}
    out: list = []
    seen = set()

    def visit(x: str, down: frozenset):
        if (x, down) in seen:
            return
        seen.add((x, down))
        out.append((x, down))
        for m in mediator_parents(g, x):
            visit(m, down | {order[m]})

    visit(g.outcome, frozenset())
    return out


def _path_formula(g: CausalGraph, regime: InterventionRegime, vs: tuple, target, meta) -> FormulaAst:
    order = {name: j for j, name in g.mediators.items()}
    inst = _path_instances(g)
    count: dict = {}
    for x, _ in inst:
        count[x] = count.get(x, 0) + 1

    def bits(down):
        return "".join("1" if j in down else "0" for j in sorted(g.mediators, reverse=True))

    def sym(x, down):
        if x == g.outcome:
            return "y"
        return _sym(x) if count[x] == 1 else f"{_sym(x)}_{bits(down)}"

    b = _Builder(g, regime, vs)
    for x, down in inst:
        med_syms = {m: sym(m, down | {order[m]}) for m in mediator_parents(g, x)}
        b.add(x, sym(x, down), bits(down), med_syms, x == g.outcome)
    return b.ast(target, meta)


def identify_classical(spec: EstimandSpec) -> FormulaAst:
    """Formula for the nested counterfactual under the classical assumptions.

    With observed exposure-induced confounders (``weightObserved``) every
    world ``j`` gets its own confounder value ``v_j`` weighted by
    ``P(V=v_j|z_j)`` and the factor of world ``j`` conditions on it.
    """
    g = spec.graph
    spec.regime.validate(g)
    vs = _resolve_nuisance(g, Semantic.CLASSICAL, spec.nuisance)
    _check_exchangeability(spec)
    meta = {"semantic": "classical", "approach": spec.regime.approach.value, "confounders": ",".join(vs)}
    if spec.regime.approach is Approach.NODE:
        return _node_formula(g, spec.regime, vs, True, spec.target, meta)
    if vs:
        raise UnsupportedCombinationError(
            "path-intervened classical identification with an exposure-induced confounder is not defined"
        )
    return _path_formula(g, spec.regime, (), spec.target, meta)


def identify_interventional(spec: EstimandSpec) -> FormulaAst:
    """Random-draw formula: confounder weights enter only the outcome factor."""
    g = spec.graph
    spec.regime.validate(g)
    vs = _resolve_nuisance(g, Semantic.INTERVENTIONAL, spec.nuisance)
    _check_exchangeability(spec)
    meta = {"semantic": "interventional", "approach": spec.regime.approach.value, "confounders": ",".join(vs),
            "draws": "conditional on C"}
    if spec.regime.approach is Approach.NODE:
        return _node_formula(g, spec.regime, vs, False, spec.target, meta)
    return _path_formula(g, spec.regime, vs, spec.target, meta)


def identify_separable(spec: EstimandSpec) -> FormulaAst:
    """Formula over the expanded graph, optionally collapsed to original names.

    ``form="components"`` keeps expanded names and is evaluated on the law of
    a component sem.  ``form="collapsed"`` applies component consistency:
    components map back to the node they decompose and a factor keeps only
    the confounder component aligned with its own label.  ``auto`` collapses
    unless confounder components are sequentially ordered.
    """
    eg: ExpandedGraph = spec.graph
    g = eg.graph
    labels = set(spec.regime.labels)
    if labels != set(eg.labels):
        from .errors import MissingLabelError

        raise MissingLabelError(f"regime labels {sorted(labels)} != component labels {sorted(eg.labels)}")
    conds = dismissible_conditions(eg)
    if spec.check_assumptions:
        bad = [c for c in conds if not c.holds(eg)]
        if bad:
            raise AssumptionViolatedError(
                "dismissible component conditions fail: " + "; ".join(c.statement for c in bad), bad
            )
    form = spec.form
    if form == "auto":
        form = "components" if (eg.sequential or eg.original is None) else "collapsed"
    if form not in ("components", "collapsed"):
        raise ValueError("form must be auto, components or collapsed")
    if form == "collapsed" and eg.sequential:
        raise UnsupportedCombinationError("sequentially ordered confounder components cannot be collapsed")

    comps = set(g.components)
    cs = _baseline(g)
    factors = []
    sums = []
    for x in eg.endogenous():
        lbl = eg.governs[x]
        given = []
        for p in g.parents(x):
            spec_p = g.node(p)
            if p in comps or spec_p.role is Role.LATENT or p in cs:
                continue
            if form == "collapsed" and spec_p.role is Role.CONFOUNDER and spec_p.component_of:
                if spec_p.label != lbl:
                    continue
            given.append(p)
        sym = "y" if x == g.outcome else _sym(x)
        factors.append((x, sym, given, lbl))
        if x != g.outcome:
            sums.append((sym, x))

    def name(n):
        return eg.original_name(n) if form == "collapsed" else n

    out = []
    for x, sym, given, lbl in factors:
        gv = [(name(p), _sym(p)) for p in given] + [(c, _sym(c)) for c in cs]
        out.append(Factor(name(x), sym, tuple(sorted(set(gv))), spec.regime.slot(lbl)))
    out += _baseline_factors(g)
    sums = [(s, name(x)) for s, x in sums] + [(_sym(c), c) for c in cs]
    meta = {"semantic": "separable", "approach": spec.regime.approach.value, "form": form}
    ast = FormulaAst(
        g.outcome, eg.detached.name, tuple(sums), tuple(out),
        tuple(sorted(spec.regime.slots().items())), spec.target, "y", tuple(sorted(meta.items())),
    )
    ast.check()
    return ast


def identify(spec: EstimandSpec) -> FormulaAst:
    if spec.semantic is Semantic.CLASSICAL:
        return identify_classical(spec)
    if spec.semantic is Semantic.INTERVENTIONAL:
        return identify_interventional(spec)
    return identify_separable(spec)
