"""Finite structural equation models and exact counterfactual oracles.

Every endogenous node ``X`` has a finite noise variable and a total mechanism
``X = f(pa(X), u)``.  The noise mode decides how counterfactual worlds share
that noise:

* ``shared``: one draw reused by every intervention context of ``X``
  (single-world independencies only, as in an FFRCISTG model);
* ``fresh``: an independent draw per distinct intervention context, so
  that e.g. ``M2(z10)`` and ``M2(z11)`` are independent.

Latent nodes are single draws visible to every world.

A node's context is the minimal set of intervened ancestors (with their
sources) reaching it once the intervened nodes lose their in-edges.  Two
occurrences with the same context are the same random variable, which keeps
composition (``Y(z, M(z)) = Y(z)``) intact.

All oracles enumerate exactly.  The enumeration walks instances in a fixed
topological order and drops variables as soon as no later instance needs
them, so results are bitwise reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np
import networkx as nx

from .counterfactual import Const, Term
from .distribution import JointDistribution
from .errors import (
    EnumerationLimitError,
    IllTypedQueryError,
    MissingLabelError,
    PseidError,
)
from .graph import CausalGraph, Role, validate_graph

MAX_STATES = 10**7
PROB_TOL = 1e-12


class NoiseMode(str, enum.Enum):
    SHARED = "shared"
    FRESH = "fresh"


@dataclass(frozen=True)
class Mechanism:
    """``table[pa_1, ..., pa_k, u]`` gives the value index of the node."""

    parents: tuple
    noise: tuple
    table: np.ndarray = field(compare=False)
    mode: NoiseMode = NoiseMode.FRESH
    group: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", NoiseMode(self.mode))
        object.__setattr__(self, "table", np.asarray(self.table, dtype=np.int64))
        object.__setattr__(self, "noise", tuple(float(x) for x in self.noise))

    @cached_property
    def cpt(self) -> np.ndarray:
        """``cpt[pa..., x] = P(X = x | pa)`` implied by the noise law."""
        k = int(self.table.max()) + 1 if self.table.size else 1
        return self.cpt_for(k)

    def cpt_for(self, size: int) -> np.ndarray:
        shape = self.table.shape[:-1] + (size,)
        out = np.zeros(shape)
        for u, pu in enumerate(self.noise):
            vals = self.table[..., u]
            np.add.at(out, tuple(np.indices(vals.shape)) + (vals,), pu)
        return out


@dataclass(frozen=True)
class DiscreteSem:
    graph: CausalGraph
    mechanisms: Mapping[str, Mechanism]
    latents: Mapping[str, tuple]

    def __post_init__(self):
        object.__setattr__(self, "mechanisms", dict(sorted(self.mechanisms.items())))
        object.__setattr__(
            self, "latents", {k: tuple(float(x) for x in v) for k, v in sorted(self.latents.items())}
        )
        self.check()

    def check(self) -> None:
        g = self.graph
        for name in g.names:
            spec = g.node(name)
            if spec.role is Role.LATENT:
                dist = self.latents.get(name)
                if dist is None:
                    raise PseidError(f"latent {name!r} has no distribution")
                if len(dist) != len(spec.domain) or min(dist) < 0 or abs(sum(dist) - 1) > PROB_TOL:
                    raise PseidError(f"latent {name!r} distribution is not a proper law")
                continue
            mech = self.mechanisms.get(name)
            if mech is None:
                raise PseidError(f"node {name!r} has no mechanism")
            if tuple(sorted(mech.parents)) != g.parents(name):
                raise PseidError(f"mechanism parents of {name!r} {mech.parents} != graph parents {g.parents(name)}")
            want = tuple(len(g.domain(p)) for p in mech.parents) + (len(mech.noise),)
            if mech.table.shape != want:
                raise PseidError(f"mechanism table of {name!r} has shape {mech.table.shape}, expected {want}")
            if mech.table.size and (mech.table.min() < 0 or mech.table.max() >= len(spec.domain)):
                raise PseidError(f"mechanism of {name!r} leaves its domain")
            if min(mech.noise) < 0 or abs(sum(mech.noise) - 1) > PROB_TOL:
                raise PseidError(f"noise of {name!r} does not sum to 1")

    def cpt(self, name: str) -> np.ndarray:
        return self.mechanisms[name].cpt_for(len(self.graph.domain(name)))

    def with_modes(self, modes: Mapping[str, NoiseMode | str]) -> "DiscreteSem":
        mechs = dict(self.mechanisms)
        for k, m in modes.items():
            mechs[k] = replace(mechs[k], mode=NoiseMode(m))
        return DiscreteSem(self.graph, mechs, self.latents)

    def mode(self, name: str) -> NoiseMode | None:
        m = self.mechanisms.get(name)
        return m.mode if m else None

    def state_space(self) -> int:
        size = 1
        for m in self.mechanisms.values():
            size *= len(m.noise)
        for d in self.latents.values():
            size *= len(d)
        return size


# --- construction helpers -------------------------------------------------


def mechanism_from_cpt(cpt: np.ndarray, parents: Sequence[str], mode=NoiseMode.FRESH, group=None) -> Mechanism:
    """Quantile coupling: a single noise variable realizes every CPT row.

    Breakpoints are the union of all cumulative row sums, so two parent
    configurations reuse the same noise draw monotonically.  Shared noise
    then maximizes cross-world dependence.
    """
    cpt = np.asarray(cpt, dtype=float)
    cum = np.cumsum(cpt, axis=-1)
    pts = np.unique(np.concatenate([[0.0, 1.0], cum.ravel()]))
    pts = pts[(pts >= 0) & (pts <= 1)]
    keep = [pts[0]]
    for x in pts[1:]:
        if x - keep[-1] > 1e-15:
            keep.append(x)
    keep[-1] = 1.0
    pts = np.array(keep)
    widths = np.diff(pts)
    mids = (pts[:-1] + pts[1:]) / 2
    k = cpt.shape[-1]
    flat = cum.reshape(-1, k)
    table = np.empty((flat.shape[0], len(mids)), dtype=np.int64)
    for r in range(flat.shape[0]):
        table[r] = np.minimum(np.searchsorted(flat[r], mids, side="right"), k - 1)
    table = table.reshape(cpt.shape[:-1] + (len(mids),))
    noise = widths / widths.sum()
    return Mechanism(tuple(parents), tuple(noise), table, NoiseMode(mode), group)


def deterministic(parents: Sequence[str], fn_table: np.ndarray, mode=NoiseMode.FRESH) -> Mechanism:
    t = np.asarray(fn_table, dtype=np.int64)[..., None]
    return Mechanism(tuple(parents), (1.0,), t, NoiseMode(mode))


def random_cpt(rng: np.random.Generator, shape: tuple, k: int, floor: float = 0.02, alpha: float = 1.0):
    raw = rng.dirichlet([alpha] * k, size=shape) if shape else rng.dirichlet([alpha] * k)
    return floor / k + (1 - floor) * raw if floor else raw


def random_sem(
    g: CausalGraph,
    rng: np.random.Generator | int | None = None,
    modes: Mapping[str, str] | str = NoiseMode.FRESH,
    floor: float = 0.02,
    alpha: float = 1.0,
) -> DiscreteSem:
    """Random positive parameterization with quantile-coupled noise."""
    rng = np.random.default_rng(rng)
    mechs, lats = {}, {}
    for name in g.topo:
        spec = g.node(name)
        if spec.role is Role.LATENT:
            lats[name] = tuple(random_cpt(rng, (), len(spec.domain), floor, alpha))
            continue
        pa = g.parents(name)
        shape = tuple(len(g.domain(p)) for p in pa)
        cpt = random_cpt(rng, shape, len(spec.domain), floor, alpha)
        mode = modes.get(name, NoiseMode.FRESH) if isinstance(modes, Mapping) else modes
        mechs[name] = mechanism_from_cpt(cpt, pa, mode)
    return DiscreteSem(g, mechs, lats)


# --- exact enumeration ----------------------------------------------------


@dataclass
class _Instance:
    key: tuple
    node: str
    parents: list  # (parent, ("c", value_index) | ("i", instance key))


class _Builder:
    """Turns nested terms into a DAG of node instances keyed by context."""

    def __init__(self, g: CausalGraph):
        self.g = g
        self.instances: dict = {}
        self.order: list = []
        self._anc_cache: dict = {}

    def _mutilated_ancestors(self, fixed: frozenset, node: str) -> frozenset:
        key = (fixed, node)
        if key not in self._anc_cache:
            G = self.g.nx.copy()
            G.remove_edges_from([(a, b) for a, b in self.g.edges if b in fixed])
            self._anc_cache[key] = frozenset(nx.ancestors(G, node))
        return self._anc_cache[key]

    def source(self, node: str, src) -> tuple:
        """Resolve a term-assignment source into a value source and its context key."""
        if isinstance(src, Const):
            dom = self.g.domain(node)
            if src.value not in dom:
                raise IllTypedQueryError(f"value {src.value!r} not in domain of {node}")
            return ("c", dom.index(src.value)), ("c", src.label, src.value)
        if isinstance(src, Term):
            if src.var != node:
                raise IllTypedQueryError(f"{node} is assigned a term for {src.var}")
            val = self.term_value(src)
            return val, ("t",) + val
        raise IllTypedQueryError(f"bad assignment source {src!r}")

    def world(self, term: Term) -> tuple:
        srcs, keys = {}, {}
        for node, src in term.assignment:
            if node not in self.g:
                raise IllTypedQueryError(f"unknown node {node!r} in {term}")
            if self.g.node(node).role is Role.LATENT:
                raise IllTypedQueryError(f"cannot intervene on latent {node!r}")
            srcs[node], keys[node] = self.source(node, src)
        return srcs, keys

    def term_value(self, term: Term) -> tuple:
        if term.var not in self.g:
            raise IllTypedQueryError(f"unknown variable {term.var!r}")
        srcs, keys = self.world(term)
        return self.value(term.var, srcs, keys)

    def value(self, node: str, srcs: dict, keys: dict) -> tuple:
        if node in srcs:
            return srcs[node]
        return ("i", self.instance(node, srcs, keys))

    def instance(self, node: str, srcs: dict, keys: dict) -> tuple:
        fixed = frozenset(srcs)
        anc = self._mutilated_ancestors(fixed, node)
        ctx = tuple(sorted((n, keys[n]) for n in fixed if n in anc))
        key = (node, ctx)
        if key in self.instances:
            return key
        parents = [(p, self.value(p, srcs, keys)) for p in self.g.parents(node)]
        inst = _Instance(key, node, parents)
        self.instances[key] = inst
        self.order.append(inst)
        return key


def _enumerate(sem: DiscreteSem, builder: _Builder, outputs: Sequence[tuple]) -> dict:
    """Exact joint law of the output sources; returns {value-index tuple: prob}."""
    order = builder.order
    pos = {inst.key: i for i, inst in enumerate(order)}
    n = len(order)
    out_keys = {src[1] for src in outputs if src[0] == "i"}

    last_use = {inst.key: (n if inst.key in out_keys else pos[inst.key]) for inst in order}
    for i, inst in enumerate(order):
        for _, src in inst.parents:
            if src[0] == "i":
                last_use[src[1]] = max(last_use[src[1]], i)

    def noise_key(inst):
        mech = sem.mechanisms[inst.node]
        if mech.mode is NoiseMode.SHARED:
            return ("u", mech.group or inst.node)
        return ("u", inst.key)

    users: dict = {}
    for i, inst in enumerate(order):
        if inst.node in sem.mechanisms:
            users.setdefault(noise_key(inst), []).append(i)

    slots: list = []
    state = {(): 1.0}
    for i, inst in enumerate(order):
        spec = sem.graph.node(inst.node)
        if spec.role is Role.LATENT:
            dist = sem.latents[inst.node]
            new = {}
            for s, p in state.items():
                for v, pv in enumerate(dist):
                    if pv > 0:
                        k = s + (v,)
                        new[k] = new.get(k, 0.0) + p * pv
            state = new
            slots.append(("v", inst.key))
        else:
            mech = sem.mechanisms[inst.node]
            getters = []
            srcmap = dict(inst.parents)
            for src in (srcmap[p] for p in mech.parents):
                if src[0] == "c":
                    getters.append((True, src[1]))
                else:
                    getters.append((False, slots.index(("v", src[1]))))
            nk = noise_key(inst)
            table = mech.table
            if len(users[nk]) > 1:
                if nk not in slots:
                    new = {}
                    for s, p in state.items():
                        for u, pu in enumerate(mech.noise):
                            if pu > 0:
                                k = s + (u,)
                                new[k] = new.get(k, 0.0) + p * pu
                    state = new
                    slots.append(nk)
                ui = slots.index(nk)
                new = {}
                for s, p in state.items():
                    pa = tuple(c if is_c else s[c] for is_c, c in getters)
                    k = s + (int(table[pa + (s[ui],)]),)
                    new[k] = new.get(k, 0.0) + p
                state = new
            else:
                cpt = sem.cpt(inst.node)
                new = {}
                for s, p in state.items():
                    pa = tuple(c if is_c else s[c] for is_c, c in getters)
                    row = cpt[pa]
                    for v, pv in enumerate(row):
                        if pv > 0:
                            k = s + (v,)
                            new[k] = new.get(k, 0.0) + p * pv
                state = new
            slots.append(("v", inst.key))
        # drop slots nobody needs any more
        keep = []
        for j, sl in enumerate(slots):
            if sl[0] == "v":
                alive = last_use[sl[1]] > i
            else:
                alive = users[sl][-1] > i
            keep.append(alive)
        if not all(keep):
            idx = [j for j, k in enumerate(keep) if k]
            new = {}
            for s, p in state.items():
                k = tuple(s[j] for j in idx)
                new[k] = new.get(k, 0.0) + p
            state = new
            slots = [slots[j] for j in idx]
        if len(state) > MAX_STATES:
            raise EnumerationLimitError(
                f"enumeration frontier exceeds {MAX_STATES} states; use sample() instead"
            )

    result = {}
    for s, p in state.items():
        vals = tuple(src[1] if src[0] == "c" else s[slots.index(("v", src[1]))] for src in outputs)
        result[vals] = result.get(vals, 0.0) + p
    return result


def twin_network(g: CausalGraph, terms: Sequence[Term], sem: DiscreteSem | None = None):
    """Multi-world DAG over the node instances needed by ``terms``.

    Returns ``(G, outputs)`` where ``outputs[i]`` is the instance key of
    ``terms[i]`` (``None`` when the term is a constant).  Latents are shared
    by construction; when ``sem`` is given, one noise node per shared-noise
    group links the instances that reuse it.
    """
    builder = _Builder(g)
    outs = [builder.term_value(t) for t in terms]
    G = nx.DiGraph()
    for inst in builder.order:
        G.add_node(inst.key)
        for _, src in inst.parents:
            if src[0] == "i":
                G.add_edge(src[1], inst.key)
    if sem is not None:
        for inst in builder.order:
            mech = sem.mechanisms.get(inst.node)
            if mech is not None and mech.mode is NoiseMode.SHARED:
                G.add_edge(("u", mech.group or inst.node), inst.key)
    return G, [o[1] if o[0] == "i" else None for o in outs]


def counterfactual_joint(sem: DiscreteSem, terms: Sequence[Term], names: Sequence[str] | None = None) -> JointDistribution:
    """Exact joint law of several (possibly nested, cross-world) terms."""
    builder = _Builder(sem.graph)
    outputs = [builder.term_value(t) for t in terms]
    table = _enumerate(sem, builder, outputs)
    names = tuple(names) if names is not None else tuple(str(t) for t in terms)
    if len(set(names)) != len(names):
        raise IllTypedQueryError("duplicate term names in joint query")
    domains = tuple(sem.graph.domain(t.var) for t in terms)
    return JointDistribution.from_dict(names, domains, table)


def observational_distribution(sem: DiscreteSem, include_latents: bool = False) -> JointDistribution:
    g = sem.graph
    names = [n for n in g.topo if include_latents or g.node(n).role is not Role.LATENT]
    return counterfactual_joint(sem, [Term(n) for n in names], names)


def oracle_nested(sem: DiscreteSem, q: Term, event) -> float:
    """``P(q = event)``; ``event`` may be a value or ``{q.var: value}``."""
    if isinstance(event, Mapping):
        event = event[q.var]
    joint = counterfactual_joint(sem, [q], ["q"])
    return joint.prob({"q": event})


def interventional_law(sem: DiscreteSem, assignment: Mapping[str, object], targets: Sequence[str]) -> JointDistribution:
    """Single-world law of ``targets`` under ``do(assignment)``."""
    items = tuple((k, Const(v, k.lower())) for k, v in sorted(assignment.items()))
    terms = [Term(t, items) if t not in assignment else Term(t) for t in targets]
    return counterfactual_joint(sem, terms, list(targets))


# --- numeric independence -------------------------------------------------


@dataclass(frozen=True)
class NumericVerdict:
    holds: bool
    max_deviation: float
    witness: dict | None = None

    def to_json(self) -> dict:
        d = {"holds": self.holds, "max_deviation": self.max_deviation}
        if self.witness is not None:
            d["witness"] = {k: _jsonable(v) for k, v in self.witness.items()}
        return d


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def numeric_independence(
    sem: DiscreteSem,
    left: Sequence[Term],
    right: Sequence[Term],
    given: Sequence[Term] = (),
    tol: float = 1e-10,
) -> NumericVerdict:
    """Exact check of ``left _||_ right | given`` over the sem's counterfactual law."""
    terms = list(left) + list(right) + list(given)
    names = [f"_{i}" for i in range(len(terms))]
    joint = counterfactual_joint(sem, terms, names)
    nl, nr = len(left), len(right)
    L, R, G = names[:nl], names[nl:nl + nr], names[nl + nr:]
    arr = joint.probs
    gax = tuple(range(nl + nr, len(names)))
    p_lrg = arr
    p_lg = arr.sum(axis=tuple(range(nl, nl + nr)), keepdims=True)
    p_rg = arr.sum(axis=tuple(range(nl)), keepdims=True)
    p_g = arr.sum(axis=tuple(range(nl + nr)), keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        expected = np.where(p_g > 0, p_lg * p_rg / np.where(p_g > 0, p_g, 1), 0.0)
    dev = np.abs(p_lrg - expected)
    worst = float(dev.max()) if dev.size else 0.0
    if worst <= tol:
        return NumericVerdict(True, worst)
    idx = np.unravel_index(int(dev.argmax()), dev.shape)
    witness = {str(t): joint.domains[i][idx[i]] for i, t in enumerate(terms)}
    return NumericVerdict(False, worst, witness)


# --- interventional (random-draw) oracle ----------------------------------


def _baseline_assignments(sem: DiscreteSem):
    g = sem.graph
    cs = list(g.baseline)
    if not cs:
        yield {}, 1.0
        return
    law = observational_distribution(sem).marginal(cs)
    for vals, p in law.items():
        if p > 0:
            yield dict(zip(cs, vals)), p


def _cond_prob(joint: JointDistribution, target: str, tval, given: Mapping) -> float:
    den = joint.prob(given) if given else 1.0
    if den <= 0:
        return 0.0
    return joint.prob({target: tval, **given}) / den


def oracle_interventional(sem: DiscreteSem, regime, event, draw: str = "conditional") -> float:
    """Probability of the outcome under the random-draw estimand.

    Each mediator occurrence of the regime's nested term is replaced by an
    independent draw ``W``.  With ``draw="conditional"`` (default) ``W`` for a
    mediator follows the law of that mediator in its own exposure world given
    its mediator parents at their drawn values and the baseline confounders.
    With ``draw="controlled"`` it follows ``P(M(z, w_parents) | c)`` instead.
    The outcome is ``Y(z, w)`` with everything else left natural.  Draws
    are conditional on the baseline confounders ``C``.
    """
    from .regime import classical_term

    g = sem.graph
    if draw not in ("conditional", "controlled"):
        raise ValueError("draw must be 'conditional' or 'controlled'")
    term = classical_term(g, regime)
    z = g.exposure
    y_val = event[g.outcome] if isinstance(event, Mapping) else event

    draws: list = []

    def collect(t: Term):
        for node, src in t.assignment:
            if isinstance(src, Term):
                collect(src)
                if src not in draws:
                    draws.append(src)

    collect(term)
    cs = list(g.baseline)
    total = 0.0
    for cvals, pc in _baseline_assignments(sem):
        c_items = {k: Const(v, k.lower()) for k, v in cvals.items()}
        tables = []
        for d in draws:
            zsrc = d.interventions[z]
            args = [n for n, s in d.assignment if isinstance(s, Term)]
            doms = [g.domain(a) for a in args]
            tab = {}
            if draw == "conditional":
                world = ((z, zsrc),)
                tnames = [d.var] + args + cs
                joint = counterfactual_joint(sem, [Term(n, world) for n in tnames], tnames)
                for avals in product(*doms):
                    cond = dict(zip(args, avals))
                    cond.update(cvals)
                    for v in g.domain(d.var):
                        tab[avals + (v,)] = _cond_prob(joint, d.var, v, cond)
            else:
                for avals in product(*doms):
                    items = [(z, zsrc)] + [(a, Const(av, a.lower())) for a, av in zip(args, avals)]
                    tnames = [d.var] + cs
                    joint = counterfactual_joint(sem, [Term(d.var, tuple(items))] + [Term(c) for c in cs], tnames)
                    for v in g.domain(d.var):
                        tab[avals + (v,)] = _cond_prob(joint, d.var, v, cvals)
            tables.append((d, args, tab))

        y_args = [n for n, s in term.assignment if isinstance(s, Term)]
        y_tab = {}
        for avals in product(*[g.domain(a) for a in y_args]):
            items = [(z, term.interventions[z])] + [(a, Const(av, a.lower())) for a, av in zip(y_args, avals)]
            joint = counterfactual_joint(sem, [Term(g.outcome, tuple(items))] + [Term(c) for c in cs], [g.outcome] + cs)
            y_tab[avals] = _cond_prob(joint, g.outcome, y_val, cvals)

        acc = 0.0
        for wvals in product(*[g.domain(d.var) for d in draws]):
            w = dict(zip(draws, wvals))
            p = 1.0
            for d, args, tab in tables:
                avals = tuple(w[d.interventions[a]] for a in args)
                p *= tab[avals + (w[d],)]
                if p == 0.0:
                    break
            if p == 0.0:
                continue
            yv = tuple(w[term.interventions[a]] for a in y_args)
            acc += p * y_tab[yv]
        total += pc * acc
    return total


# --- component (separable) sems --------------------------------------------


def oracle_separable(component_sem: DiscreteSem, assignment: Mapping[str, object], event) -> float:
    """Single-world ``P(Y(z_i for every exposure component) = event)``.

    ``assignment`` maps component names (``Z0``) or their labels (``0``) to
    exposure values and must cover every exposure component.
    """
    g = component_sem.graph
    comps = g.components
    by_label = {g.node(c).label: c for c in comps}
    resolved = {}
    for k, v in assignment.items():
        if k in comps:
            resolved[k] = v
        elif str(k) in by_label:
            resolved[by_label[str(k)]] = v
        else:
            raise MissingLabelError(f"{k!r} is not an exposure component")
    missing = sorted(set(comps) - set(resolved))
    if missing:
        raise MissingLabelError(f"assignment misses components {missing}")
    items = tuple((c, Const(v, f"z{g.node(c).label}")) for c, v in sorted(resolved.items()))
    y = g.outcome
    y_val = event[y] if isinstance(event, Mapping) else event
    return oracle_nested(component_sem, Term(y, items), y_val)


def sem_graph_for_expansion(eg) -> CausalGraph:
    """Graph of a component sem: the expanded graph plus the detached exposure.

    The exposure keeps its original in-edges and feeds each exposure
    component through an identity mechanism, so that observationally every
    component equals the exposure.
    """
    z = eg.detached.name
    comps = eg.graph.components
    nodes = list(eg.graph.nodes) + [eg.detached]
    edges = [(a, b) for a, b in eg.graph.edges if b not in comps]
    edges += [(p, z) for p in eg.graph.parents(comps[0])]
    edges += [(z, c) for c in comps]
    return validate_graph(nodes, edges, expanded=True)


def component_sem(
    sem: DiscreteSem,
    eg,
    coupling: str = "independent",
    overrides: Mapping[str, Mechanism] | None = None,
) -> DiscreteSem:
    """Build a sem over an expanded graph by copying the original mechanisms.

    Each non-exposure node of the expansion reuses the mechanism of the node
    it stands for, reading each original parent from the expanded parent
    recorded in ``eg.source_of``.  Components of one decomposed node get
    independent noise (``coupling="independent"``, cross-world component
    manipulability) or one shared draw (``coupling="shared"``, pathwise
    single-world component consistency).  ``overrides`` replaces mechanisms
    wholesale, e.g. for sequentially ordered confounder components.
    """
    if coupling not in ("independent", "shared"):
        raise ValueError("coupling must be 'independent' or 'shared'")
    overrides = dict(overrides or {})
    G = sem_graph_for_expansion(eg)
    z = eg.detached.name
    mechs, lats = {}, {}
    for name in G.names:
        spec = G.node(name)
        if spec.role is Role.LATENT:
            lats[name] = sem.latents[name]
            continue
        if name in overrides:
            mechs[name] = overrides[name]
            continue
        if spec.role is Role.COMPONENT:
            n = len(G.domain(z))
            mechs[name] = Mechanism((z,), (1.0,), np.arange(n)[:, None])
            continue
        if name == z:
            mechs[name] = sem.mechanisms[z]
            continue
        orig = eg.component_of.get(name, name)
        om = sem.mechanisms[orig]
        exp_parents = G.parents(name)
        src_map = {op: eg.source_of.get((name, op), op) for op in om.parents}
        # broadcast the original table over the expanded parent list
        axes = []
        for ep in exp_parents:
            hits = [i for i, op in enumerate(om.parents) if src_map[op] == ep]
            axes.append(hits[0] if hits else None)
        for op in om.parents:
            if src_map[op] not in exp_parents:
                raise PseidError(f"expanded node {name!r} lacks a parent standing for {op!r}")
        shape = tuple(len(G.domain(p)) for p in exp_parents) + (len(om.noise),)
        table = np.empty(shape, dtype=np.int64)
        for idx in np.ndindex(*shape[:-1]):
            orig_idx = [0] * len(om.parents)
            for ax, src in zip(idx, axes):
                if src is not None:
                    orig_idx[src] = ax
            table[idx] = om.table[tuple(orig_idx)]
        mode, group = om.mode, None
        if orig != name and coupling == "shared":
            mode, group = NoiseMode.SHARED, orig
        mechs[name] = Mechanism(exp_parents, om.noise, table, mode, group)
    return DiscreteSem(G, mechs, lats)


def random_component_sem(eg, rng=None, floor: float = 0.02, base_sem: DiscreteSem | None = None) -> DiscreteSem:
    """Random parameterization of every non-component node of an expansion."""
    rng = np.random.default_rng(rng)
    G = sem_graph_for_expansion(eg)
    z = eg.detached.name
    mechs, lats = {}, {}
    for name in G.topo:
        spec = G.node(name)
        if spec.role is Role.LATENT:
            lats[name] = tuple(random_cpt(rng, (), len(spec.domain), floor))
        elif spec.role is Role.COMPONENT:
            n = len(G.domain(z))
            mechs[name] = Mechanism((z,), (1.0,), np.arange(n)[:, None])
        else:
            pa = G.parents(name)
            shape = tuple(len(G.domain(p)) for p in pa)
            mechs[name] = mechanism_from_cpt(random_cpt(rng, shape, len(spec.domain), floor), pa)
    return DiscreteSem(G, mechs, lats)


# --- sampling ---------------------------------------------------------------


@dataclass(frozen=True)
class Dataset:
    variables: tuple
    domains: tuple
    data: np.ndarray  # value indices, shape (n, len(variables))

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    def column(self, var: str) -> np.ndarray:
        return self.data[:, self.variables.index(var)]

    def to_csv(self) -> str:
        lines = [",".join(self.variables)]
        for row in self.data:
            lines.append(",".join(str(self.domains[j][v]) for j, v in enumerate(row)))
        return "\n".join(lines) + "\n"


def sample(sem: DiscreteSem, n: int, seed: int | None = 0) -> Dataset:
    """Forward-sample ``n`` i.i.d. observational rows (deterministic per seed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    g = sem.graph
    cols = {}
    for name in g.topo:
        spec = g.node(name)
        if spec.role is Role.LATENT:
            dist = np.asarray(sem.latents[name])
            cols[name] = rng.choice(len(dist), size=n, p=dist / dist.sum())
            continue
        mech = sem.mechanisms[name]
        noise = np.asarray(mech.noise)
        u = rng.choice(len(noise), size=n, p=noise / noise.sum())
        idx = tuple(cols[p] for p in mech.parents) + (u,)
        cols[name] = mech.table[idx]
    names = tuple(x for x in g.topo if g.node(x).role is not Role.LATENT)
    data = np.stack([cols[x] for x in names], axis=1) if names else np.zeros((n, 0), dtype=np.int64)
    return Dataset(names, tuple(g.domain(x) for x in names), data)
