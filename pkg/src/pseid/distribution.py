"""Dense joint distributions over finite variables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import VariableMismatchError


@dataclass(frozen=True)
class JointDistribution:
    variables: tuple
    domains: tuple
    probs: np.ndarray

    def __post_init__(self):
        shape = tuple(len(d) for d in self.domains)
        if self.probs.shape != shape:
            raise ValueError(f"probability array shape {self.probs.shape} != {shape}")

    @classmethod
    def from_dict(cls, variables, domains, table: Mapping[tuple, float]) -> "JointDistribution":
        arr = np.zeros(tuple(len(d) for d in domains))
        for key, p in table.items():
            arr[key] += p
        return cls(tuple(variables), tuple(tuple(d) for d in domains), arr)

    def axis(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise VariableMismatchError(f"variable {var!r} not in distribution") from None

    def domain(self, var: str) -> tuple:
        return self.domains[self.axis(var)]

    def total(self) -> float:
        return float(self.probs.sum())

    def marginal(self, keep: Sequence[str]) -> "JointDistribution":
        keep = list(keep)
        axes = [self.axis(v) for v in keep]
        drop = tuple(i for i in range(len(self.variables)) if i not in axes)
        arr = self.probs.sum(axis=drop) if drop else self.probs
        # summed array has remaining axes in original order; permute to requested order
        remaining = [i for i in range(len(self.variables)) if i in axes]
        perm = [remaining.index(a) for a in axes]
        arr = np.transpose(arr, perm) if perm else arr
        return JointDistribution(tuple(keep), tuple(self.domains[a] for a in axes), np.asarray(arr))

    def index_of(self, var: str, value) -> int:
        dom = self.domain(var)
        try:
            return dom.index(value)
        except ValueError:
            raise VariableMismatchError(f"value {value!r} not in domain of {var!r}") from None

    def prob(self, event: Mapping[str, object]) -> float:
        """Probability of a (partial) assignment given by value."""
        m = self.marginal(list(event))
        idx = tuple(m.index_of(v, event[v]) for v in event)
        return float(m.probs[idx]) if idx else float(m.probs.sum())

    def items(self):
        for idx in np.ndindex(*self.probs.shape):
            yield tuple(self.domains[i][k] for i, k in enumerate(idx)), float(self.probs[idx])

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "domains": [list(d) for d in self.domains],
            "table": [[list(vals), p] for vals, p in self.items() if p > 0],
        }
