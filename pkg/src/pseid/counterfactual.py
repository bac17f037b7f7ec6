"""Nested counterfactual terms such as ``Y{z0, M1[z1, M2(z2)], M2(z2)}``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union


@dataclass(frozen=True)
class Const:
    """A fixed intervention value; ``label`` names the regime slot it came from."""

    value: object
    label: str = ""

    def __str__(self) -> str:
        return self.label or str(self.value)


@dataclass(frozen=True)
class Term:
    """Variable ``var`` under an assignment of nodes to constants or sub-terms.

    An empty assignment denotes the actual (factual) variable.
    """

    var: str
    assignment: tuple = ()

    def __post_init__(self):
        if isinstance(self.assignment, Mapping):
            object.__setattr__(self, "assignment", tuple(sorted(self.assignment.items())))
        else:
            object.__setattr__(self, "assignment", tuple(sorted(self.assignment)))

    @property
    def interventions(self) -> dict:
        return dict(self.assignment)

    def __str__(self) -> str:
        if not self.assignment:
            return self.var
        inner = ",".join(str(src) for _, src in self.assignment)
        return f"{self.var}({inner})"

    def subterms(self):
        for _, src in self.assignment:
            if isinstance(src, Term):
                yield src
                yield from src.subterms()

    def labels(self) -> set:
        out = set()
        for _, src in self.assignment:
            if isinstance(src, Const):
                out.add(src.label)
            else:
                out |= src.labels()
        return out

    def substitute(self, values: Mapping[str, object]) -> "Term":
        """Replace constant values by label, leaving the structure intact."""
        items = []
        for node, src in self.assignment:
            if isinstance(src, Const):
                src = Const(values.get(src.label, src.value), src.label)
            else:
                src = src.substitute(values)
            items.append((node, src))
        return Term(self.var, tuple(items))


Source = Union[Const, Term]


def actual(var: str) -> Term:
    return Term(var)


def do(var: str, **assign) -> Term:
    """Shorthand: ``do("Y", Z=Const(1, "z"))``."""
    return Term(var, tuple(assign.items()))
