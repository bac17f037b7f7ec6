"""Assumption ledger: graph-level and numeric verdicts per semantic and approach.

Verdict vocabulary: ``holds``, ``fails``, ``untestable``.  Single-world
statements are read off SWIGs by d-separation.  Cross-world statements are
read off a multi-world instance graph in which latents are shared and, when
a sem is supplied, shared-noise nodes link the worlds.  Without a sem a
cross-world statement can only be refuted (through latents), never
confirmed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Sequence

import networkx as nx

from .counterfactual import Const, Term
from .expansion import ExpandedGraph, dismissible_conditions, expand_node_intervened, expand_path_intervened
from .graph import CausalGraph, Role, dag_d_separated
from .regime import Approach, InterventionRegime, classical_term, mediator_parents
from .sem import (
    DiscreteSem,
    NoiseMode,
    NumericVerdict,
    component_sem,
    counterfactual_joint,
    numeric_independence,
    observational_distribution,
    sem_graph_for_expansion,
    twin_network,
)
from .swig import split

NUMERIC_TOL = 1e-10
HOLDS, FAILS, UNTESTABLE = "holds", "fails", "untestable"


class Category(str, enum.Enum):
    EXCHANGEABILITY = "Exchangeability"
    WEAK = "WeakCrossWorld"
    STRONG = "StrongCrossWorld"
    RANDOM_DRAW = "RandomDrawSubstitution"
    MANIPULABILITY = "ComponentManipulability"
    CONSISTENCY = "ComponentConsistency"
    DISMISSIBLE = "Dismissible"


@dataclass(frozen=True)
class AssumptionEntry:
    name: str
    category: Category
    statement: str
    graph_verdict: str
    numeric: NumericVerdict | None = None
    anchor: str = ""
    extension: bool = False
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.graph_verdict != FAILS and (self.numeric is None or self.numeric.holds)

    @property
    def numeric_label(self) -> str:
        if self.numeric is None:
            return "-"
        if self.numeric.holds:
            return f"holds({self.numeric.max_deviation:.1e})"
        return f"fails({self.numeric.max_deviation:.3g})"

    def to_json(self) -> dict:
        d = {
            "name": self.name,
            "category": self.category.value,
            "statement": self.statement,
            "graph_verdict": self.graph_verdict,
            "numeric_verdict": self.numeric.to_json() if self.numeric else None,
            "anchor": self.anchor,
        }
        if self.extension:
            d["extension"] = True
        if self.note:
            d["note"] = self.note
        return d


@dataclass(frozen=True)
class AssumptionReport:
    semantic: str
    approach: str
    entries: tuple
    notes: tuple = ()

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def failing(self) -> list:
        return [e for e in self.entries if not e.ok]

    def by_category(self) -> dict:
        out: dict = {}
        for e in self.entries:
            out.setdefault(e.category.value, []).append(e)
        return out

    def counts(self) -> dict:
        return {k: len(v) for k, v in self.by_category().items()}

    def to_json(self) -> dict:
        return {
            "semantic": self.semantic,
            "approach": self.approach,
            "ok": self.ok,
            "entries": [e.to_json() for e in self.entries],
            "notes": list(self.notes),
        }

    def to_text(self) -> str:
        """Fixed-width table grouped by category."""
        w_stmt = max([len(e.statement) for e in self.entries] + [9])
        lines = [f"{self.semantic} x {self.approach}"]
        header = f"  {'statement':<{w_stmt}}  {'graph':<10}  numeric"
        rule = "  " + "-" * (len(header) + 8)
        lines.append(header)
        for cat, items in self.by_category().items():
            lines.append(rule)
            lines.append(f"  [{cat}]")
            for e in items:
                flag = " *ext" if e.extension else ""
                lines.append(f"  {e.statement:<{w_stmt}}  {e.graph_verdict:<10}  {e.numeric_label}{flag}")
        lines.append(rule)
        lines.append(f"  ledger: {'PASS' if self.ok else 'FAIL'}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)


# --- helpers ------------------------------------------------------------------


def _observed_confounders(g: CausalGraph) -> list:
    return [v for v in g.confounders if g.node(v).observed]


def _render(t: Term, exposure: str) -> str:
    if not t.assignment:
        return t.var
    srcs = t.interventions
    order = ([exposure] if exposure in srcs else []) + sorted(k for k in srcs if k != exposure)
    parts = []
    for k in order:
        s = srcs[k]
        parts.append(_render(s, exposure) if isinstance(s, Term) else str(s))
    return f"{t.var}({','.join(parts)})"


def _numeric_loop(sem: DiscreteSem, consts: Sequence, build: Callable) -> NumericVerdict:
    """Max factorization residual over every value of the labelled constants.

    ``consts`` lists ``(label, node)``; ``build(values)`` returns
    ``(left, right, given)`` term lists for one assignment of the labels.
    """
    worst = 0.0
    witness = None
    doms = [sem.graph.domain(node) for _, node in consts]
    for vals in product(*doms):
        values = {lbl: v for (lbl, _), v in zip(consts, vals)}
        left, right, given = build(values)
        res = numeric_independence(sem, left, right, given, NUMERIC_TOL)
        if res.max_deviation > worst:
            worst = res.max_deviation
            if not res.holds:
                witness = {**{f"{k}": v for k, v in values.items()}, **(res.witness or {})}
    return NumericVerdict(worst <= NUMERIC_TOL, worst, witness)


def _cross_world_verdict(g: CausalGraph, left, right, sem=None, given=()) -> str:
    G, outs = twin_network(g, list(left) + list(right) + list(given), sem)
    nl, nr = len(left), len(right)
    a = {o for o in outs[:nl] if o is not None}
    b = {o for o in outs[nl:nl + nr] if o is not None}
    c = {o for o in outs[nl + nr:] if o is not None}
    if a & b:
        return FAILS
    sep = dag_d_separated(G, a - c, b - c, c)
    if not sep:
        return FAILS
    return HOLDS if sem is not None else UNTESTABLE


def _consts_of(t: Term) -> list:
    out = []
    for node, s in t.assignment:
        if isinstance(s, Const):
            out.append((s.label, node))
        else:
            out += _consts_of(s)
    return out


def _placeholder(g: CausalGraph, t: Term) -> Term:
    return t.substitute({lbl: g.domain(node)[0] for lbl, node in _consts_of(t)})


def _prime_clashes(left: Term, right: Term) -> Term:
    """Rename constants of ``right`` whose labels already occur in ``left``."""
    taken = {lbl for lbl, _ in _consts_of(left)}
    ren = {lbl: lbl + "'" for lbl, _ in _consts_of(right) if lbl in taken and not lbl.startswith("z")}

    def walk(t: Term) -> Term:
        items = []
        for node, s in t.assignment:
            if isinstance(s, Const):
                s = Const(s.value, ren.get(s.label, s.label))
            else:
                s = walk(s)
            items.append((node, s))
        return Term(t.var, tuple(items))

    return walk(right) if ren else right


def _cross_entry(g, name, category, left: Term, right: Term, sem, anchor, note="") -> AssumptionEntry:
    z = g.exposure
    right = _prime_clashes(left, right)
    cs = list(g.baseline)
    stmt = f"{_render(left, z)} _||_ {_render(right, z)}" + (f" | {','.join(cs)}" if cs else "")
    given = [Term(c) for c in cs]
    verdict = _cross_world_verdict(g, [_placeholder(g, left)], [_placeholder(g, right)], sem, given)
    numeric = None
    if sem is not None:
        consts = sorted(set(_consts_of(left)) | set(_consts_of(right)))
        numeric = _numeric_loop(sem, consts, lambda v: ([left.substitute(v)], [right.substitute(v)], given))
    return AssumptionEntry(name, category, stmt, verdict, numeric, anchor, note=note)


# --- exchangeability ----------------------------------------------------------


def _world_instances(g: CausalGraph, regime: InterventionRegime) -> list:
    """Distinct (node, args) patterns of the regime's nested term."""
    term = classical_term(g, regime)
    seen, out = set(), []

    def walk(t: Term):
        key = t.var
        if key not in seen:
            seen.add(key)
            out.append(t)
        for _, s in t.assignment:
            if isinstance(s, Term):
                walk(s)

    walk(term)
    return out


def _exchangeability_graph_entries(g: CausalGraph, xs: Sequence[str], draw: bool = False) -> list:
    z = g.exposure
    order = {name: j for j, name in g.mediators.items()}
    cs = list(g.baseline)
    vs = _observed_confounders(g)
    out = []
    for x in xs:
        args = sorted(mediator_parents(g, x), key=lambda m: order[m])
        sym = "w" if draw else "m"
        arg_lbl = {a: f"{sym}{order[a]}" for a in args}
        lbl = ",".join(["z"] + [arg_lbl[a] for a in args])
        xname = f"{x}({lbl})"

        # X(z, args) _||_ Z | C
        s = split(g, {z: g.domain(z)[0], **{a: g.domain(a)[0] for a in args}})
        verdict = HOLDS if s.d_separated({x}, {z}, set(cs)) else FAILS
        stmt = f"{xname} _||_ {z}" + (f" | {','.join(cs)}" if cs else "")

        def build_z(values, x=x, args=args, arg_lbl=arg_lbl):
            items = [(z, Const(values["z"], "z"))] + [(a, Const(values[arg_lbl[a]], arg_lbl[a])) for a in args]
            return [Term(x, tuple(items))], [Term(z)], [Term(c) for c in cs]

        consts = [("z", z)] + [(arg_lbl[a], a) for a in args]
        out.append((stmt, verdict, consts, build_z))

        for k, a in enumerate(args):
            lower = args[:k]
            higher = args[k + 1:]
            s = split(g, {a: g.domain(a)[0], **{b: g.domain(b)[0] for b in lower}})
            given = [z] + cs + [v for v in vs if v not in s.intervened] + list(higher)
            verdict = HOLDS if s.d_separated({x}, {a}, set(given)) else FAILS
            stmt = f"{xname} _||_ {a} | {','.join(given)}"

            def build_m(values, x=x, a=a, lower=lower, given=given, arg_lbl=arg_lbl):
                items = [(b, Const(values[arg_lbl[b]], arg_lbl[b])) for b in [a] + list(lower)]
                return [Term(x, tuple(items))], [Term(a)], [Term(n) for n in given]

            consts_m = [(arg_lbl[b], b) for b in [a] + list(lower)]
            out.append((stmt, verdict, consts_m, build_m))
    return out


def check_exchangeability(g, regime: InterventionRegime, semantic, sem: DiscreteSem | None = None) -> list:
    """Exchangeability entries required by the target formula."""
    from .identify import Semantic

    semantic = Semantic(semantic)
    if semantic is Semantic.SEPARABLE:
        eg = g if isinstance(g, ExpandedGraph) else _expand(g, regime.approach)
        return _separable_exchangeability(eg, sem)
    insts = _world_instances(g, regime)
    xs = [t.var for t in insts]
    if semantic is Semantic.INTERVENTIONAL:
        xs = [g.outcome]
    anchor = f"{semantic.value}:exchangeability"
    raw = _exchangeability_graph_entries(g, xs, draw=semantic is Semantic.INTERVENTIONAL)
    out = []
    for i, (stmt, verdict, consts, build) in enumerate(raw):
        numeric = _numeric_loop(sem, consts, build) if sem is not None else None
        out.append(AssumptionEntry(f"exch-{i + 1}", Category.EXCHANGEABILITY, stmt, verdict, numeric, anchor))
    return out


def _expand(g: CausalGraph, approach) -> ExpandedGraph:
    return expand_node_intervened(g) if Approach(approach) is Approach.NODE else expand_path_intervened(g)


def _component_consts(eg: ExpandedGraph) -> list:
    return [(f"z{eg.graph.node(c).label}", c) for c in eg.graph.components]


def _all_components(eg: ExpandedGraph, values: dict) -> tuple:
    return tuple((c, Const(values[f"z{eg.graph.node(c).label}"], f"z{eg.graph.node(c).label}")) for c in eg.graph.components)


def _separable_exchangeability(eg: ExpandedGraph, sem: DiscreteSem | None) -> list:
    G = sem_graph_for_expansion(eg)
    comps = eg.graph.components
    cs = list(G.baseline)
    s = split(G, {c: G.domain(c)[0] for c in comps})
    out = []
    zlab = "(" + ",".join(f"z{eg.graph.node(c).label}" for c in comps) + ")"
    for i, x in enumerate(eg.endogenous()):
        gov = eg.component(eg.governs[x])
        verdict = HOLDS if s.d_separated({x}, {gov}, set(cs)) else FAILS
        stmt = f"{x}{zlab} _||_ {gov}" + (f" | {','.join(cs)}" if cs else "")
        numeric = None
        if sem is not None:
            def build(values, x=x, gov=gov):
                return [Term(x, _all_components(eg, values))], [Term(gov)], [Term(c) for c in cs]

            numeric = _numeric_loop(sem, _component_consts(eg), build)
        spec = eg.graph.node(x)
        ext = spec.role is Role.CONFOUNDER
        out.append(AssumptionEntry(f"exch-{i + 1}", Category.EXCHANGEABILITY, stmt, verdict, numeric,
                                   "separable:exchangeability", ext,
                                   "confounder component; not part of the core ledger" if ext else ""))
    return out


# --- cross-world independence -------------------------------------------------


def _fixed_world_term(g: CausalGraph, t: Term) -> Term:
    """``X(z_j, m...)`` with mediator arguments held at labelled constants."""
    z = g.exposure
    items = []
    for node, s in t.assignment:
        if node == z:
            items.append((node, s))
        else:
            items.append((node, Const(g.domain(node)[0], _arg_label(g, t, node))))
    return Term(t.var, tuple(items))


def _arg_label(g: CausalGraph, parent: Term, node: str) -> str:
    sub = parent.interventions[node]
    if isinstance(sub, Term):
        lbl = sub.interventions[g.exposure].label[1:]
        order = g.mediator_order(node)
        return f"m{lbl}" if len(lbl) > 1 else f"m{order}"
    return node.lower()


def cross_world_entries(g: CausalGraph, regime: InterventionRegime, sem: DiscreteSem | None = None) -> list:
    z = g.exposure
    term = classical_term(g, regime)
    out = []
    if regime.approach is Approach.NODE:
        worlds = []
        seen = set()

        def walk(t):
            if t.var not in seen:
                seen.add(t.var)
                worlds.append(t)
            for _, s in t.assignment:
                if isinstance(s, Term):
                    walk(s)

        walk(term)
        fixed = [_fixed_world_term(g, t) for t in worlds]
        for i, (a, b) in enumerate(combinations(fixed, 2)):
            out.append(_cross_entry(g, f"cw-{i + 1}", Category.WEAK, a, b, sem, "classical:cross-world"))
        return out

    k = 0
    nodes_by_instance: dict = {}

    def members(t: Term) -> set:
        res = {t.var}
        for s in t.subterms():
            res.add(s.var)
        return res

    def walk_path(t: Term):
        nonlocal k
        args = [s for _, s in t.assignment if isinstance(s, Term)]
        fixed = _fixed_world_term(g, t)
        for a in args:
            k += 1
            out.append(_cross_entry(g, f"cw-{k}", Category.WEAK, fixed, a, sem, "classical:cross-world"))
        for a, b in combinations(args, 2):
            k += 1
            shared = members(a) & members(b)
            cat = Category.STRONG if shared else Category.WEAK
            out.append(_cross_entry(g, f"cw-{k}", cat, a, b, sem, "classical:cross-world"))
        for a in args:
            walk_path(a)

    walk_path(term)
    return out


def _mode_verdict(g: CausalGraph, node: str, sem: DiscreteSem | None) -> str:
    if any(g.node(p).role is Role.LATENT for p in g.parents(node)):
        return FAILS
    if sem is None:
        return UNTESTABLE
    return FAILS if sem.mode(node) is NoiseMode.SHARED else HOLDS


def _self_cross(g: CausalGraph, node: str, sem, name, category, anchor) -> AssumptionEntry:
    z = g.exposure
    a = Term(node, ((z, Const(g.domain(z)[0], "z")),))
    b = Term(node, ((z, Const(g.domain(z)[0], "z'")),))
    cs = list(g.baseline)
    given = [Term(c) for c in cs]
    verdict = _mode_verdict(g, node, sem)
    numeric = None
    if sem is not None:
        consts = [("z", z), ("z'", z)]
        numeric = _numeric_loop(sem, consts, lambda v: ([a.substitute(v)], [b.substitute(v)], given))
    stmt = f"{node}(z) _||_ {node}(z')" + (f" | {','.join(cs)}" if cs else "")
    return AssumptionEntry(name, category, stmt, verdict, numeric, anchor)


def check_weak_cwi(g: CausalGraph, sem: DiscreteSem | None = None) -> list:
    """``V(z) _||_ V(z')`` for every exposure-induced confounder."""
    if not g.confounders:
        return [AssumptionEntry("weak-cwi", Category.WEAK, "no exposure-induced confounder", HOLDS,
                                None, "cross-world:weak")]
    return [
        _self_cross(g, v, sem, f"weak-cwi-{v}", Category.WEAK, "cross-world:weak")
        for v in g.confounders
    ]


def check_strong_cwi(g: CausalGraph, sem: DiscreteSem | None = None) -> list:
    """``M_j(z) _||_ M_j(z')`` for every mediator except the one nearest the outcome."""
    meds = [m for j, m in sorted(g.mediators.items()) if j != 1]
    if not meds:
        return [AssumptionEntry("strong-cwi", Category.STRONG, "no mediator beyond M_1 (vacuous)", HOLDS,
                                None, "cross-world:strong")]
    return [_self_cross(g, m, sem, f"strong-cwi-{m}", Category.STRONG, "cross-world:strong") for m in meds]


# --- separable ------------------------------------------------------------------


def _noise_groups(sem: DiscreteSem | None) -> dict:
    out: dict = {}
    if sem is None:
        return out
    for n, m in sem.mechanisms.items():
        if m.mode is NoiseMode.SHARED and m.group:
            out.setdefault(m.group, []).append(n)
    return out


def _dismissible_numeric(eg: ExpandedGraph, sem: DiscreteSem, cond) -> NumericVerdict:
    comps = eg.graph.components
    doms = [sem.graph.domain(c) for c in comps]
    laws = {}
    names = [cond.target] + list(cond.given)
    for vals in product(*doms):
        items = tuple((c, Const(v, f"z{eg.graph.node(c).label}")) for c, v in zip(comps, vals))
        laws[vals] = counterfactual_joint(sem, [Term(n, items) for n in names], names)
    gi = comps.index(cond.governing)
    worst, witness = 0.0, None
    groups: dict = {}
    for vals, law in laws.items():
        groups.setdefault(vals[gi], []).append((vals, law))
    for items in groups.values():
        ref_vals, ref = items[0]
        ref_c = _conditional(ref)
        for vals, law in items[1:]:
            cur = _conditional(law)
            both = ref_c[1] & cur[1]
            dev = float(abs(ref_c[0] - cur[0])[:, both].max()) if both.any() else 0.0
            if dev > worst:
                worst = dev
                witness = {"components_a": list(ref_vals), "components_b": list(vals)}
    return NumericVerdict(worst <= NUMERIC_TOL, worst, witness if worst > NUMERIC_TOL else None)


def _conditional(law):
    import numpy as np

    arr = law.probs.reshape(law.probs.shape[0], -1)
    den = arr.sum(axis=0)
    pos = den > 1e-15
    cond = np.where(pos, arr / np.where(pos, den, 1.0), 0.0)
    return cond, pos


def check_dismissible(eg: ExpandedGraph, sem: DiscreteSem | None = None) -> list:
    """Dismissible conditions plus component manipulability and consistency rows.

    ``sem`` must be a component sem (see :func:`pseid.sem.component_sem`).
    """
    out = []
    g = eg.graph
    comps = g.components
    zname = eg.detached.name
    for i, c in enumerate(dismissible_conditions(eg)):
        verdict = HOLDS if c.holds(eg) else FAILS
        if verdict is HOLDS and sem is not None:
            # shared noise between components is invisible to the expanded graph
            G = eg.graph.nx.copy()
            for grp, members in _noise_groups(sem).items():
                for m in members:
                    G.add_edge(("u", grp), m)
            if not dag_d_separated(G, {c.target}, set(c.others), {c.governing, *c.given}):
                verdict = FAILS
        numeric = _dismissible_numeric(eg, sem, c) if sem is not None else None
        out.append(AssumptionEntry(f"dismissible-{i + 1}", Category.DISMISSIBLE,
                                   f"{c.statement}  =>  {c.reduced_form(eg)}", verdict, numeric,
                                   "separable:dismissible"))

    out.append(AssumptionEntry("manipulability", Category.MANIPULABILITY, " _||_ ".join(comps), HOLDS, None,
                               "separable:manipulability", note="components are set by intervention"))
    groups = eg.split_nodes()
    seq_v = eg.sequential
    for orig, members in sorted(groups.items()):
        if seq_v and all(g.node(m).role is Role.CONFOUNDER for m in members):
            continue
        s = split(sem.graph if sem is not None else sem_graph_for_expansion(eg),
                  {c: g.domain(c)[0] for c in comps})
        G = s.graph.copy()
        for grp, ms in _noise_groups(sem).items():
            for m in ms:
                G.add_edge(("u", grp), m)
        cs = set(g.baseline)
        verdict = HOLDS if sem is not None else UNTESTABLE
        for a, b in combinations(members, 2):
            if not dag_d_separated(G, {a}, {b}, cs):
                verdict = FAILS
        numeric = None
        if sem is not None:
            worst, wit = 0.0, None
            for a, b in combinations(members, 2):
                res = _numeric_loop(
                    sem, _component_consts(eg),
                    lambda v, a=a, b=b: ([Term(a, _all_components(eg, v))], [Term(b, _all_components(eg, v))],
                                         [Term(c) for c in sorted(cs)]),
                )
                if res.max_deviation >= worst:
                    worst, wit = res.max_deviation, res.witness
            numeric = NumericVerdict(worst <= NUMERIC_TOL, worst, wit)
        stmt = " _||_ ".join(f"{m}(z)" for m in members) + (f" | {','.join(sorted(cs))}" if cs else "")
        out.append(AssumptionEntry(f"cwcm-{orig}", Category.MANIPULABILITY, stmt,
                                   verdict, numeric, "separable:cross-world-manipulability"))

    numeric = None
    if sem is not None:
        law = observational_distribution(sem)
        arr = law.marginal([zname] + list(comps))
        agree = sum(p for vals, p in arr.items() if all(v == vals[0] for v in vals[1:]))
        dev = abs(1.0 - agree)
        numeric = NumericVerdict(dev <= NUMERIC_TOL, dev)
    out.append(AssumptionEntry("consistency", Category.CONSISTENCY, " = ".join([zname] + list(comps)),
                               UNTESTABLE if sem is None else HOLDS, numeric, "separable:consistency"))
    for orig, members in sorted(groups.items()):
        numeric = _swcc_marginals(eg, sem, members) if sem is not None else None
        out.append(AssumptionEntry(f"swcc-{orig}", Category.CONSISTENCY,
                                   " = ".join([f"{orig}(z)"] + [f"{m}(z)" for m in members]),
                                   UNTESTABLE if sem is None else HOLDS, numeric,
                                   "separable:single-world-consistency",
                                   note="numeric check compares component marginals in each single world"))
    return out


def _swcc_marginals(eg: ExpandedGraph, sem: DiscreteSem, members) -> NumericVerdict:
    comps = eg.graph.components
    worst = 0.0
    witness = None
    for z in sem.graph.domain(eg.detached.name):
        items = tuple((c, Const(z, "z")) for c in comps)
        laws = [counterfactual_joint(sem, [Term(m, items)], ["x"]).probs for m in members]
        for a, b in combinations(range(len(laws)), 2):
            dev = float(abs(laws[a] - laws[b]).max())
            if dev > worst:
                worst, witness = dev, {"z": z, "components": [members[a], members[b]]}
    return NumericVerdict(worst <= NUMERIC_TOL, worst, witness if worst > NUMERIC_TOL else None)


def swcc_collapse_deviation(original: DiscreteSem, comp: DiscreteSem, eg: ExpandedGraph, y=None) -> float:
    """Max over z of ``|P(Y(z,...,z)) - P(Y(z))|`` between component and original sem."""
    from .sem import oracle_nested, oracle_separable

    ys = [y] if y is not None else list(original.graph.domain(original.graph.outcome))
    zname = eg.detached.name
    worst = 0.0
    for z in original.graph.domain(zname):
        for yv in ys:
            a = oracle_separable(comp, {c: z for c in eg.graph.components}, yv)
            b = oracle_nested(original, Term(original.graph.outcome, ((zname, Const(z, "z")),)), yv)
            worst = max(worst, abs(a - b))
    return worst


# --- aggregation --------------------------------------------------------------


def _random_draw_entries(g: CausalGraph, regime: InterventionRegime) -> list:
    out = []
    seen = set()
    order = {name: j for j, name in g.mediators.items()}
    for t in _world_instances(g, regime):
        if t.var == g.outcome or t.var in seen:
            continue
        seen.add(t.var)
        j = order[t.var]
        args = sorted(mediator_parents(g, t.var), key=lambda m: order[m])
        inner = ",".join([f"z{j}"] + [f"w{order[a]}" for a in args])
        stmt = f"P(W{j}({inner})) = P({t.var}({inner}))"
        out.append(AssumptionEntry(f"draw-{t.var}", Category.RANDOM_DRAW, stmt, HOLDS, None,
                                   "interventional:random-draw", note="definitional"))
    out.sort(key=lambda e: e.statement, reverse=True)
    return out


def assumption_ledger(g, regime: InterventionRegime, semantic, sem: DiscreteSem | None = None) -> AssumptionReport:
    """Aggregate every assumption entry for one semantic and approach.

    For the separable semantic ``g`` may be the original graph (it is
    expanded according to the regime's approach) or an
    :class:`ExpandedGraph`; ``sem`` may be either the original sem (turned
    into an independent-coupling component sem) or a component sem.
    """
    from .identify import Semantic

    semantic = Semantic(semantic)
    approach = regime.approach
    notes = []
    if semantic is Semantic.SEPARABLE:
        eg = g if isinstance(g, ExpandedGraph) else _expand(g, approach)
        csem = sem
        if sem is not None and set(sem.graph.names) != set(sem_graph_for_expansion(eg).names):
            csem = component_sem(sem, eg, "independent")
            notes.append("component sem built from the original sem with independent component noise")
        entries = _separable_exchangeability(eg, csem) + check_dismissible(eg, csem)
        return AssumptionReport(semantic.value, approach.value, tuple(entries), tuple(notes))

    regime.validate(g)
    entries = check_exchangeability(g, regime, semantic, sem)
    if semantic is Semantic.CLASSICAL:
        entries += cross_world_entries(g, regime, sem)
        if g.confounders:
            entries += check_weak_cwi(g, sem)
        if approach is Approach.PATH and g.p >= 2:
            entries += check_strong_cwi(g, sem)
    else:
        entries += _random_draw_entries(g, regime)
        notes.append("random draws are conditional on the baseline confounders")
    if sem is None:
        notes.append("no sem supplied: cross-world entries can only be refuted, not confirmed")
    return AssumptionReport(semantic.value, approach.value, tuple(entries), tuple(notes))
