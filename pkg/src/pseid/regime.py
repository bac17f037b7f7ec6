"""Intervention regimes and the nested counterfactual terms they induce."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from .counterfactual import Const, Term
from .errors import MissingLabelError, UnsupportedCombinationError, ValueOutOfDomainError
from .graph import CausalGraph

MAX_NODE_P = 6
MAX_PATH_P = 4


class Approach(str, enum.Enum):
    NODE = "node"
    PATH = "path"


def node_labels(p: int) -> tuple:
    return tuple(str(j) for j in range(p + 1))


def path_labels(p: int) -> tuple:
    return tuple("".join(bits) for bits in product("01", repeat=p)) if p else ("",)


@dataclass(frozen=True)
class InterventionRegime:
    approach: Approach
    assignment: tuple

    def __post_init__(self):
        object.__setattr__(self, "approach", Approach(self.approach))
        if isinstance(self.assignment, Mapping):
            object.__setattr__(self, "assignment", tuple(sorted(self.assignment.items())))

    @property
    def values(self) -> dict:
        return dict(self.assignment)

    @property
    def labels(self) -> tuple:
        return tuple(lbl for lbl, _ in self.assignment)

    def value(self, label: str):
        try:
            return self.values[label]
        except KeyError:
            raise MissingLabelError(f"regime has no label {label!r}") from None

    @staticmethod
    def slot(label: str) -> str:
        return f"z{label}"

    def slots(self) -> dict:
        return {self.slot(lbl): v for lbl, v in self.assignment}

    def expected_labels(self, p: int) -> tuple:
        return node_labels(p) if self.approach is Approach.NODE else path_labels(p)

    def validate(self, g: CausalGraph) -> "InterventionRegime":
        p = g.p
        if self.approach is Approach.NODE and p > MAX_NODE_P:
            raise UnsupportedCombinationError(f"node approach supports p <= {MAX_NODE_P}, got {p}")
        if self.approach is Approach.PATH and p > MAX_PATH_P:
            raise UnsupportedCombinationError(f"path approach supports p <= {MAX_PATH_P}, got {p}")
        want = set(self.expected_labels(p))
        have = set(self.labels)
        if want != have:
            missing = sorted(want - have)
            extra = sorted(have - want)
            raise MissingLabelError(f"regime labels mismatch: missing {missing}, unexpected {extra}")
        dom = g.domain(g.exposure)
        for lbl, v in self.assignment:
            if v not in dom:
                raise ValueOutOfDomainError(f"label z{lbl}={v!r} not in exposure domain {dom}")
        return self

    def differing(self, other: "InterventionRegime") -> tuple:
        a, b = self.values, other.values
        return tuple(sorted(k for k in a if a[k] != b.get(k)))

    def with_value(self, label: str, value) -> "InterventionRegime":
        vals = self.values
        self.value(label)
        vals[label] = value
        return InterventionRegime(self.approach, vals)

    def __str__(self) -> str:
        return ",".join(f"z{lbl}={v}" for lbl, v in self.assignment)


def uniform_regime(g: CausalGraph, approach, z) -> InterventionRegime:
    approach = Approach(approach)
    labels = node_labels(g.p) if approach is Approach.NODE else path_labels(g.p)
    return InterventionRegime(approach, {lbl: z for lbl in labels})


def regime_from_values(g: CausalGraph, approach, values: Sequence) -> InterventionRegime:
    """Build a regime from values listed in label order (z0..zp or z0..0..z1..1)."""
    approach = Approach(approach)
    labels = node_labels(g.p) if approach is Approach.NODE else path_labels(g.p)
    if len(values) != len(labels):
        raise MissingLabelError(f"expected {len(labels)} label values, got {len(values)}")
    return InterventionRegime(approach, dict(zip(labels, values))).validate(g)


def mediator_parents(g: CausalGraph, x: str) -> tuple:
    meds = set(g.mediators.values())
    return tuple(p for p in g.parents(x) if p in meds)


def _bits(g: CausalGraph, members: frozenset) -> str:
    meds = g.mediators
    return "".join("1" if j in members else "0" for j in sorted(meds, reverse=True))


def classical_term(g: CausalGraph, regime: InterventionRegime) -> Term:
    """Nested counterfactual targeted by the node or path regime.

    Node approach: ``Y{z0, M1[z1, M2(z2)], M2(z2)}``; path approach:
    ``Y{z00, M1[z01, M2(z11)], M2(z10)}``.  Mediator arguments are the
    mediator parents of each variable.
    """
    z = g.exposure
    order = {name: j for j, name in g.mediators.items()}
    vals = regime.values

    if regime.approach is Approach.NODE:
        cache = {}

        def node_term(x: str, label: str) -> Term:
            if x in cache:
                return cache[x]
            items = [(z, Const(vals[label], regime.slot(label)))]
            for m in mediator_parents(g, x):
                items.append((m, node_term(m, str(order[m]))))
            cache[x] = Term(x, tuple(items))
            return cache[x]

        return node_term(g.outcome, "0")

    def path_term(x: str, down: frozenset) -> Term:
        label = _bits(g, down)
        items = [(z, Const(vals[label], regime.slot(label)))]
        for m in mediator_parents(g, x):
            items.append((m, path_term(m, down | {order[m]})))
        return Term(x, tuple(items))

    return path_term(g.outcome, frozenset())


def total_effect_term(g: CausalGraph, z, label: str = "z") -> Term:
    return Term(g.outcome, ((g.exposure, Const(z, label)),))


def world_label(term: Term, exposure: str) -> str:
    """Regime label (without the leading ``z``) of the exposure constant in a term."""
    src = term.interventions[exposure]
    return src.label[1:]
