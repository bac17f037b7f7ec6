"""Symbolic sum-product identification formulas.

A :class:`FormulaAst` is ``sum_{s1..sk} prod_f P(target_f = sym | given_f)``
over observational conditionals.  A factor's exposure slot (``"z1"``) stands
for the conditioning event ``Z = z1`` whose value comes from the regime.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Factor:
    target: str
    value: str
    given: tuple = ()
    slot: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "given", tuple(tuple(x) for x in self.given))

    def symbols(self) -> set:
        return {self.value} | {s for _, s in self.given}

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "value": self.value,
            "given": [list(x) for x in self.given],
            "slot": self.slot,
        }


@dataclass(frozen=True)
class FormulaAst:
    outcome: str
    exposure: str
    sum_vars: tuple
    factors: tuple
    regime: tuple = ()
    target_value: object = None
    outcome_symbol: str = "y"
    meta: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sum_vars", tuple(tuple(x) for x in self.sum_vars))
        object.__setattr__(self, "factors", tuple(self.factors))
        if isinstance(self.regime, dict):
            object.__setattr__(self, "regime", tuple(sorted(self.regime.items())))
        if isinstance(self.meta, dict):
            object.__setattr__(self, "meta", tuple(sorted(self.meta.items())))

    @property
    def meta_dict(self) -> dict:
        return dict(self.meta)

    @property
    def slots(self) -> dict:
        return dict(self.regime)

    def variables(self) -> set:
        out = {f.target for f in self.factors} | {v for f in self.factors for v, _ in f.given}
        if any(f.slot for f in self.factors):
            out.add(self.exposure)
        return out

    def symbol_var(self) -> dict:
        out = {s: v for s, v in self.sum_vars}
        out[self.outcome_symbol] = self.outcome
        return out

    def check(self) -> None:
        """Every sum symbol must be the target of exactly one factor."""
        targets = [f.value for f in self.factors]
        bound = set(self.symbol_var())
        for s, _ in self.sum_vars:
            if targets.count(s) != 1:
                raise ValueError(f"sum symbol {s!r} is the target of {targets.count(s)} factors")
        for f in self.factors:
            for sym in f.symbols():
                if sym not in bound:
                    raise ValueError(f"free symbol {sym!r} in factor for {f.target}")
            if f.slot is not None and f.slot not in self.slots:
                raise ValueError(f"factor slot {f.slot!r} not in regime")

    def with_regime(self, regime: dict) -> "FormulaAst":
        return replace(self, regime=tuple(sorted(regime.items())))

    def with_target(self, value) -> "FormulaAst":
        return replace(self, target_value=value)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "outcome": self.outcome,
            "exposure": self.exposure,
            "outcome_symbol": self.outcome_symbol,
            "target_value": self.target_value,
            "sum_vars": [list(x) for x in self.sum_vars],
            "factors": [f.to_json() for f in self.factors],
            "regime": [[k, v] for k, v in self.regime],
            "meta": {k: v for k, v in self.meta},
        }

    @classmethod
    def from_json(cls, d) -> "FormulaAst":
        if isinstance(d, str):
            d = json.loads(d)
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported formula schema version {d.get('schema_version')!r}")
        factors = tuple(
            Factor(f["target"], f["value"], tuple(tuple(x) for x in f["given"]), f["slot"]) for f in d["factors"]
        )
        return cls(
            d["outcome"],
            d["exposure"],
            tuple(tuple(x) for x in d["sum_vars"]),
            factors,
            tuple((k, v) for k, v in d["regime"]),
            d["target_value"],
            d["outcome_symbol"],
            tuple(sorted(d.get("meta", {}).items())),
        )


# --- rendering ----------------------------------------------------------------


def _text_factor(f: Factor, ast: FormulaAst) -> str:
    tgt = f"{f.target}={f.value}"
    cond = [f.slot] if f.slot else []
    cond += [f"{v}={s}" for v, s in f.given]
    return f"P({tgt}|{','.join(cond)})" if cond else f"P({tgt})"


def _latex_sym(s: str) -> str:
    head = s.rstrip("0123456789_")
    tail = s[len(head):].replace("_", "")
    return f"{head}_{{{tail}}}" if tail else head


def _latex_var(v: str) -> str:
    head = v.rstrip("0123456789_")
    tail = v[len(head):].replace("_", "")
    return f"{head}_{{{tail}}}" if tail else head


def _latex_factor(f: Factor) -> str:
    tgt = f"{_latex_var(f.target)}={_latex_sym(f.value)}"
    cond = [_latex_sym(f.slot)] if f.slot else []
    cond += [f"{_latex_var(v)}={_latex_sym(s)}" for v, s in f.given]
    return rf"P\big({tgt}\big|{','.join(cond)}\big)" if cond else rf"P\big({tgt}\big)"


def render_formula(ast: FormulaAst, fmt: str = "text") -> str:
    """Deterministic rendering as ``text``, ``latexLike`` or ``json``."""
    if fmt == "json":
        return json.dumps(ast.to_json(), sort_keys=True, indent=2)
    if fmt == "text":
        head = f"P({ast.outcome}={ast.outcome_symbol})"
        sums = ",".join(s for s, _ in ast.sum_vars)
        body = " ".join(_text_factor(f, ast) for f in ast.factors)
        rhs = f"sum_{{{sums}}} {body}" if sums else body
        return f"{head} = {rhs}"
    if fmt in ("latexLike", "latex"):
        sums = "".join(rf"\sum_{{{_latex_sym(s)}}}" for s, _ in ast.sum_vars)
        body = " ".join(_latex_factor(f) for f in ast.factors)
        return f"{sums} {body}".strip()
    raise ValueError(f"unknown format {fmt!r}")


# --- normalization ------------------------------------------------------------


def _signatures(ast: FormulaAst, rounds: int = 4) -> dict:
    syms = [s for s, _ in ast.sum_vars]
    var = ast.symbol_var()
    sig = {s: (var[s],) for s in syms}
    sig[ast.outcome_symbol] = ("<outcome>",)

    def factor_shape(f: Factor, cur: dict) -> tuple:
        given = tuple(sorted((v, cur[s]) for v, s in f.given))
        return (f.target, cur[f.value], f.slot, given)

    for _ in range(rounds):
        new = {}
        for s in syms:
            uses = []
            for f in ast.factors:
                if f.value == s:
                    uses.append(("t", factor_shape(f, sig)))
                for v, g in f.given:
                    if g == s:
                        uses.append(("g", v, factor_shape(f, sig)))
            new[s] = (var[s], repr(sorted(map(repr, uses))))
        new[ast.outcome_symbol] = sig[ast.outcome_symbol]
        sig = new
    return sig


def normalize_formula(ast: FormulaAst, algebraic: bool = False) -> FormulaAst:
    """Canonical symbol names and ordering; ``meta`` is dropped.

    With ``algebraic=True`` factors whose target symbol is summed and used
    nowhere else are removed first (they sum to one).
    """
    if algebraic:
        ast = drop_leaf_sums(ast)
    sig = _signatures(ast)
    syms = sorted((s for s, _ in ast.sum_vars), key=lambda s: (ast.symbol_var()[s], sig[s], s))
    rename = {ast.outcome_symbol: "y"}
    counts: dict = {}
    for s in syms:
        v = ast.symbol_var()[s]
        k = counts.get(v, 0)
        counts[v] = k + 1
        rename[s] = f"{v.lower()}_{k}"
    factors = []
    for f in ast.factors:
        given = tuple(sorted((v, rename[s]) for v, s in f.given))
        factors.append(Factor(f.target, rename[f.value], given, f.slot))
    factors.sort(key=lambda f: (f.target, f.slot or "", f.value, f.given))
    sum_vars = sorted((rename[s], v) for s, v in ast.sum_vars)
    return FormulaAst(
        ast.outcome, ast.exposure, tuple(sum_vars), tuple(factors), ast.regime, ast.target_value, "y", ()
    )


def drop_leaf_sums(ast: FormulaAst) -> FormulaAst:
    changed = True
    factors = list(ast.factors)
    sums = list(ast.sum_vars)
    while changed:
        changed = False
        for s, v in list(sums):
            used = [f for f in factors if s in {g for _, g in f.given}]
            owners = [f for f in factors if f.value == s]
            if not used and len(owners) == 1:
                factors.remove(owners[0])
                sums.remove((s, v))
                changed = True
    return replace(ast, factors=tuple(factors), sum_vars=tuple(sums))


def canonical_bytes(ast: FormulaAst) -> bytes:
    return json.dumps(normalize_formula(ast).to_json(), sort_keys=True).encode()
