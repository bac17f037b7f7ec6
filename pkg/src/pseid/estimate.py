"""Evaluate identification formulas on exact laws or samples; PSE contrasts."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .distribution import JointDistribution
from .errors import EmptyDatasetError, PositivityError, VariableMismatchError
from .formula import FormulaAst
from .regime import InterventionRegime


class PositivityWarning(UserWarning):
    pass


def _tables(ast: FormulaAst, variables: tuple, domains: tuple, mass: np.ndarray):
    needed = sorted(ast.variables())
    missing = [v for v in needed if v not in variables]
    if missing:
        raise VariableMismatchError(f"formula variables {missing} are not in the law/dataset")
    return JointDistribution(tuple(variables), tuple(domains), mass)


def _factor_tensor(f, ast: FormulaAst, law: JointDistribution, target_value, smoothing: float, strict: bool, label: str):
    vars_ = [f.target] + [v for v, _ in f.given]
    if f.slot is not None:
        vars_.append(ast.exposure)
    arr = law.marginal(vars_).probs
    if f.slot is not None:
        z = ast.slots[f.slot]
        arr = arr[..., law.index_of(ast.exposure, z)]
    k = arr.shape[0]
    den = arr.sum(axis=0, keepdims=True)
    num = arr + smoothing
    den_s = den + smoothing * k
    empty = den_s <= 0
    if empty.any():
        where = np.argwhere(empty[0])
        names = [v for v, _ in f.given]
        sample = [dict(zip(names, (law.domain(n)[i] for n, i in zip(names, idx)))) for idx in where[:3]]
        msg = f"zero-probability conditioning event for {f.target} ({label}); strata {sample}"
        if strict:
            raise PositivityError(msg)
        if label == "plugin":
            warnings.warn(msg, PositivityWarning, stacklevel=3)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(empty, 0.0, num / np.where(empty, 1.0, den_s))
    subs = [f.value] + [s for _, s in f.given]
    if f.value == ast.outcome_symbol:
        cond = cond[law.index_of(ast.outcome, target_value)]
        subs = subs[1:]
    return cond, subs


def _contract(ast: FormulaAst, law: JointDistribution, target_value, smoothing=0.0, strict=False, label="exact") -> float:
    if target_value is None:
        raise ValueError("formula has no target outcome value; pass one explicitly")
    ids: dict = {}
    operands = []
    for f in ast.factors:
        t, subs = _factor_tensor(f, ast, law, target_value, smoothing, strict, label)
        # repeated symbols inside one factor become a diagonal
        for s in subs:
            ids.setdefault(s, len(ids))
        operands += [t, [ids[s] for s in subs]]
    if not operands:
        return 1.0
    return float(np.einsum(*operands, []))


def evaluate(ast: FormulaAst, law: JointDistribution, target=None, strict: bool = False) -> float:
    """Exact sum-product value on a joint law.

    Factors whose conditioning event has probability zero contribute zero;
    ``strict=True`` raises :class:`PositivityError` instead.
    """
    target = ast.target_value if target is None else target
    law = _tables(ast, law.variables, law.domains, law.probs)
    return _contract(ast, law, target, 0.0, strict, "exact")


def evaluate_distribution(ast: FormulaAst, law: JointDistribution, strict: bool = False) -> dict:
    return {y: evaluate(ast, law, y, strict) for y in law.domain(ast.outcome)}


def empirical_law(dataset, variables=None) -> JointDistribution:
    if dataset.n == 0:
        raise EmptyDatasetError("dataset has no rows")
    variables = tuple(variables or dataset.variables)
    missing = [v for v in variables if v not in dataset.variables]
    if missing:
        raise VariableMismatchError(f"dataset lacks columns {missing}")
    cols = [dataset.variables.index(v) for v in variables]
    doms = tuple(dataset.domains[c] for c in cols)
    counts = np.zeros(tuple(len(d) for d in doms))
    np.add.at(counts, tuple(dataset.data[:, c] for c in cols), 1.0)
    return JointDistribution(variables, doms, counts / dataset.n)


def evaluate_plugin(ast: FormulaAst, dataset, target=None, smoothing: float = 0.0, strict: bool = False) -> float:
    """Plug-in value using empirical frequencies.

    Empty strata make their factor zero and emit a :class:`PositivityWarning`.
    ``smoothing`` adds a pseudo-count to every cell of each conditional.
    """
    if dataset.n == 0:
        raise EmptyDatasetError("dataset has no rows")
    needed = sorted(ast.variables())
    missing = [v for v in needed if v not in dataset.variables]
    if missing:
        raise VariableMismatchError(f"dataset lacks columns {missing}")
    law = empirical_law(dataset, needed)
    counts = JointDistribution(law.variables, law.domains, law.probs * dataset.n)
    target = ast.target_value if target is None else target
    return _contract(ast, counts, target, smoothing, strict, "plugin")


@dataclass(frozen=True)
class PseContrast:
    semantic: str
    approach: str
    regime_a: InterventionRegime
    regime_b: InterventionRegime
    value: float
    provenance: str
    differing: tuple

    def to_json(self) -> dict:
        return {
            "semantic": self.semantic,
            "approach": self.approach,
            "regime_a": dict(self.regime_a.assignment),
            "regime_b": dict(self.regime_b.assignment),
            "differing_labels": list(self.differing),
            "value": self.value,
            "provenance": self.provenance,
        }


def pse_contrast(spec, regime_a: InterventionRegime, regime_b: InterventionRegime, data, target=None, **kw) -> PseContrast:
    """``value(regime_a) - value(regime_b)`` on a law or a dataset."""
    from .identify import identify

    vals = []
    for r in (regime_a, regime_b):
        ast = identify(replace(spec, regime=r))
        if isinstance(data, JointDistribution):
            vals.append(evaluate(ast, data, target if target is not None else spec.target, **kw))
        else:
            vals.append(evaluate_plugin(ast, data, target if target is not None else spec.target, **kw))
    prov = "exactLaw" if isinstance(data, JointDistribution) else f"plugIn({data.n})"
    return PseContrast(
        spec.semantic.value, regime_a.approach.value, regime_a, regime_b,
        vals[0] - vals[1], prov, regime_a.differing(regime_b),
    )


def telescoping_regimes(labels, z, z_ref) -> list:
    """Regimes switching labels from ``z_ref`` to ``z`` one at a time (label order)."""
    cur = {lbl: z_ref for lbl in labels}
    out = [dict(cur)]
    for lbl in labels:
        cur[lbl] = z
        out.append(dict(cur))
    return out
