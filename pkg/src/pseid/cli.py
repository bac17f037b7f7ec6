"""``pseid`` command line.

Exit codes: 0 ok, 1 analysis-level failure (violated assumption, red ledger,
formula/oracle disagreement), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .assumptions import assumption_ledger
from .distribution import JointDistribution
from .dsl import SpecDocument, parse_file
from .errors import PseidError, SpecError, UnsupportedCombinationError
from .estimate import evaluate, evaluate_plugin
from .expansion import dismissible_conditions
from .formula import SCHEMA_VERSION, render_formula
from .identify import EstimandSpec, Semantic, identify
from .regime import Approach, InterventionRegime, classical_term
from .sem import (
    Dataset,
    oracle_interventional,
    oracle_nested,
    oracle_separable,
    observational_distribution,
    random_component_sem,
    random_sem,
    sample,
)
from .swig import Sym, counterfactual_independencies, split

DEFAULT_TOL = 1e-12


class UsageError(Exception):
    pass


@dataclass
class Query:
    semantic: Semantic
    approach: Approach
    regime: InterventionRegime
    contrast: InterventionRegime | None
    nuisance: str | None
    target: object
    form: str
    key: tuple | None  # position key of the spec query, if any

    def to_json(self) -> dict:
        d = {
            "semantic": self.semantic.value,
            "approach": self.approach.value,
            "labels": dict(self.regime.assignment),
            "target": self.target,
        }
        if self.contrast is not None:
            d["contrast"] = dict(self.contrast.assignment)
        if self.nuisance:
            d["nuisance"] = self.nuisance
        if self.form != "auto":
            d["form"] = self.form
        return d


# --- query resolution -------------------------------------------------------------


def _parse_labels(text: str) -> tuple:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            k, v = part.split(":", 1)
            out.append((k.strip(), _atom(v.strip())))
        else:
            out.append(_atom(part))
    if any(isinstance(x, tuple) for x in out) and not all(isinstance(x, tuple) for x in out):
        raise UsageError("--labels mixes 'label:value' and plain values")
    return tuple(out)


def _atom(s: str):
    try:
        return int(s)
    except ValueError:
        try:
            return float(s)
        except ValueError:
            return s


def _default_labels(doc: SpecDocument, approach: Approach) -> tuple:
    """Label 0 (or the all-zero path) at the top exposure value, the rest at the bottom."""
    g = doc.graph
    if doc.is_expanded:
        labels = sorted(g.node(c).label for c in g.components)
        dom = g.domain(g.components[0])
    else:
        from .regime import node_labels, path_labels

        labels = list(node_labels(g.p) if approach is Approach.NODE else path_labels(g.p))
        dom = g.domain(g.exposure)
    return tuple((lbl, dom[-1] if i == 0 else dom[0]) for i, lbl in enumerate(labels))


def _queries(doc: SpecDocument, args) -> list:
    g = doc.graph
    ydom = g.domain(g.outcome)
    if getattr(args, "semantic", None):
        sem = Semantic(args.semantic)
        app = Approach(args.approach)
        match = [(i, q) for i, q in enumerate(doc.queries) if q.semantic == sem.value and q.approach == app.value]
        src = match[0][1] if match else None
        if args.labels:
            labels = _parse_labels(args.labels)
        elif src is not None:
            labels = src.labels
        else:
            labels = _default_labels(doc, app)
        contrast = None
        if getattr(args, "contrast", None):
            contrast = doc.regime(app, _parse_labels(args.contrast))
        elif src is not None and src.contrast and not args.labels:
            contrast = doc.regime(app, src.contrast)
        target = _atom(args.target) if getattr(args, "target", None) else (
            src.target if src is not None and src.target is not None else ydom[-1])
        nuisance = getattr(args, "nuisance", None) or (src.nuisance if src is not None else None)
        form = getattr(args, "form", None) or (src.form if src is not None and src.form else "auto")
        key = ("query", match[0][0]) if match else None
        return [Query(sem, app, doc.regime(app, labels), contrast, nuisance, target, form, key)]
    if not doc.queries:
        raise UsageError("spec has no queries; pass --semantic and --approach")
    out = []
    for i, q in enumerate(doc.queries):
        app = Approach(q.approach)
        out.append(Query(
            Semantic(q.semantic), app, doc.regime(app, q.labels, ("query", i)),
            doc.regime(app, q.contrast, ("query", i)) if q.contrast else None,
            q.nuisance, q.target if q.target is not None else ydom[-1], q.form or "auto", ("query", i),
        ))
    return out


# --- core evaluation ---------------------------------------------------------------


def _graph_for(doc: SpecDocument, q: Query):
    if q.semantic is Semantic.SEPARABLE:
        return doc.expansion(q.approach)
    if doc.is_expanded:
        raise UnsupportedCombinationError("a pre-expanded spec supports only the separable semantic")
    return doc.graph


def _spec(doc: SpecDocument, q: Query, regime: InterventionRegime | None = None, check=True) -> EstimandSpec:
    return EstimandSpec(q.semantic, regime or q.regime, _graph_for(doc, q), q.target, q.nuisance, check, q.form)


def _sems(doc: SpecDocument, q: Query, seed: int):
    """(original sem or None, sem to run the oracle on, provenance)."""
    if q.semantic is Semantic.SEPARABLE:
        eg = doc.expansion(q.approach)
        if doc.sem is not None:
            return (None if doc.is_expanded else doc.sem), doc.component_sem(eg, "independent"), "spec"
        if doc.is_expanded:
            return None, random_component_sem(eg, seed), f"random(seed={seed})"
        base = random_sem(doc.graph, seed)
        from .sem import component_sem

        return base, component_sem(base, eg, "independent"), f"random(seed={seed})"
    if doc.sem is not None:
        return doc.sem, doc.sem, "spec"
    s = random_sem(doc.graph, seed)
    return s, s, f"random(seed={seed})"


def _oracle(q: Query, sem, regime: InterventionRegime) -> float:
    if q.semantic is Semantic.CLASSICAL:
        return oracle_nested(sem, classical_term(sem.graph, regime), q.target)
    if q.semantic is Semantic.INTERVENTIONAL:
        return oracle_interventional(sem, regime, q.target)
    return oracle_separable(sem, regime.values, q.target)


def _law_for(ast, base, osem) -> JointDistribution:
    form = ast.meta_dict.get("form")
    if form == "collapsed" and base is not None:
        return observational_distribution(base)
    return observational_distribution(osem)


def run_query(doc: SpecDocument, q: Query, seed: int = 0, tol: float = DEFAULT_TOL) -> dict:
    out = {"query": q.to_json()}
    base, osem, prov = _sems(doc, q, seed)
    out["sem"] = prov
    ledger_graph = _graph_for(doc, q)
    ledger = assumption_ledger(ledger_graph, q.regime, q.semantic, osem)
    out["ledger"] = ledger.to_json()
    try:
        ast = identify(_spec(doc, q))
    except PseidError as e:
        out.update(error=_diag(e), ok=False)
        return out
    out["formula"] = render_formula(ast, "text")
    law = _law_for(ast, base, osem)
    val = evaluate(ast, law, q.target)
    orc = _oracle(q, osem, q.regime)
    dev = abs(val - orc)
    out.update(value=val, oracle=orc, deviation=dev, agree=dev <= tol)
    ok = dev <= tol and ledger.ok
    if q.contrast is not None:
        ast_b = identify(_spec(doc, q, q.contrast))
        vb = evaluate(ast_b, law, q.target)
        ob = _oracle(q, osem, q.contrast)
        cdev = abs((val - vb) - (orc - ob))
        out["contrast"] = {
            "labels": dict(q.contrast.assignment),
            "differing_labels": list(q.regime.differing(q.contrast)),
            "value": val - vb,
            "oracle": orc - ob,
            "deviation": cdev,
        }
        ok = ok and cdev <= tol
    out["ok"] = bool(ok)
    return out


# --- output -------------------------------------------------------------------------


def _diag(e: Exception, path: str = "", doc: SpecDocument | None = None, key=None) -> dict:
    if isinstance(e, SpecError):
        line, col = max(e.line, 1), max(e.col, 1)
        code = f"{e.code}[{e.kind}]" if e.kind else e.code
    else:
        line, col = (1, 1)
        if doc is not None:
            if key is not None and key in doc.positions:
                line, col = doc.pos(*key)
            elif doc.nodes:
                g0 = doc.nodes[0].name
                line, col = doc.pos("node", g0)
        code = getattr(e, "code", type(e).__name__)
    return {"path": path, "line": line, "col": col, "code": code, "message": str(e.args[0]) if e.args else str(e)}


def _emit(payload: dict, fmt: str, text: str) -> None:
    if fmt == "json":
        payload = {"schema_version": SCHEMA_VERSION, **payload}
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    return str(o)


def _result_text(r: dict) -> str:
    q = r["query"]
    labels = ",".join(f"z{k}={v}" for k, v in q["labels"].items())
    lines = [f"== {q['semantic']} / {q['approach']}  [{labels}]  target={q['target']}  sem={r.get('sem')}"]
    if "error" in r:
        lines.append(f"   error: {r['error']['code']}: {r['error']['message']}")
    else:
        lines.append(f"   {r['formula']}")
        lines.append(f"   formula {r['value']:.15g}  oracle {r['oracle']:.15g}  |dev| {r['deviation']:.3g}"
                     f"  {'agree' if r['agree'] else 'DISAGREE'}")
        if "contrast" in r:
            c = r["contrast"]
            lines.append(f"   contrast vs {','.join(f'z{k}={v}' for k, v in c['labels'].items())}: "
                         f"formula {c['value']:.15g}  oracle {c['oracle']:.15g}  |dev| {c['deviation']:.3g}")
    lines.append(_ledger_text(r["ledger"]))
    lines.append(f"   result: {'PASS' if r['ok'] else 'FAIL'}")
    return "\n".join(lines)


def _ledger_text(led: dict) -> str:
    entries = led["entries"]
    w = max([len(e["statement"]) for e in entries] + [9])
    lines = [f"   {'statement':<{w}}  {'graph':<10}  numeric"]
    cat = None
    for e in entries:
        if e["category"] != cat:
            cat = e["category"]
            lines.append(f"   [{cat}]")
        nv = e["numeric_verdict"]
        num = "-" if nv is None else (("holds" if nv["holds"] else "FAILS") + f"({nv['max_deviation']:.2g})")
        mark = "  <-- red" if e["graph_verdict"] == "fails" or (nv is not None and not nv["holds"]) else ""
        lines.append(f"   {e['statement']:<{w}}  {e['graph_verdict']:<10}  {num}{mark}")
    lines.append(f"   ledger: {'all green' if led['ok'] else 'RED'}")
    return "\n".join(lines)


# --- commands -----------------------------------------------------------------------


def cmd_validate(doc: SpecDocument, args) -> int:
    g = doc.graph
    info = {
        "command": "validate",
        "nodes": [n.name for n in doc.nodes],
        "edges": [list(e) for e in doc.edges],
        "expanded": doc.is_expanded,
        "p": g.p,
        "has_sem": doc.has_sem,
        "queries": len(doc.queries),
        "ok": True,
    }
    if doc.sem is not None:
        info["noise_modes"] = {k: m.mode.value for k, m in doc.sem.mechanisms.items()}
    text = (f"ok: {len(doc.nodes)} nodes, {len(doc.edges)} edges, p={g.p}"
            f"{', expanded' if doc.is_expanded else ''}, sem={'yes' if doc.has_sem else 'no'}, "
            f"{len(doc.queries)} queries")
    _emit(info, args.format, text)
    return 0


def cmd_swig(doc: SpecDocument, args) -> int:
    g = doc.graph
    if args.intervene:
        names = [x.strip() for x in args.intervene.split(",") if x.strip()]
    elif doc.is_expanded:
        names = list(g.components)
    else:
        names = [g.exposure] + [m for _, m in sorted(g.mediators.items())]
    for n in names:
        if n not in g:
            raise UsageError(f"unknown node {n!r} in --intervene")
    s = split(g, {n: Sym(n.lower()) for n in names})
    labels = {n: str(s.var(n)) for n in g.names}
    stmts = [str(x) for x in counterfactual_independencies(s)]
    edges = sorted([a, b] for a, b in s.graph.edges)
    payload = {"command": "swig", "intervened": names, "nodes": labels, "edges": edges,
               "independencies": stmts, "ok": True}
    lines = [f"SWIG splitting {', '.join(names)}"]
    lines += [f"  {a} -> {b}" for a, b in edges]
    lines.append("independencies:")
    lines += [f"  {x}" for x in stmts]
    _emit(payload, args.format, "\n".join(lines))
    return 0


def cmd_expand(doc: SpecDocument, args) -> int:
    eg = doc.expansion(args.approach)
    g = eg.graph
    conds = dismissible_conditions(eg)
    payload = {
        "command": "expand",
        "approach": eg.approach.value,
        "sequential": eg.sequential,
        "nodes": [{"name": n.name, "role": n.role.value, "component_of": n.component_of, "label": n.label}
                  for n in g.nodes],
        "edges": [list(e) for e in g.edges],
        "attribution": {k: str(v) for k, v in sorted(eg.attribution.items())},
        "dismissible": [{"statement": c.statement, "holds": c.holds(eg), "reduces_to": c.reduced_form(eg)}
                        for c in conds],
        "ok": all(c.holds(eg) for c in conds),
    }
    lines = [f"expanded ({eg.approach.value}{', sequential' if eg.sequential else ''}): "
             f"components {', '.join(g.components)}"]
    lines += [f"  {a} -> {b}" for a, b in g.edges]
    lines.append("dismissible component conditions:")
    lines += [f"  {c.statement}  [{'holds' if c.holds(eg) else 'FAILS'}]  => {c.reduced_form(eg)}" for c in conds]
    _emit(payload, args.format, "\n".join(lines))
    return 0 if payload["ok"] else 1


def cmd_check(doc: SpecDocument, args) -> int:
    reports = []
    for q in _queries(doc, args):
        _, osem, prov = _sems(doc, q, args.seed) if doc.sem is not None else (None, None, "none")
        rep = assumption_ledger(_graph_for(doc, q), q.regime, q.semantic, osem)
        reports.append({"query": q.to_json(), "sem": prov, "ledger": rep.to_json(), "ok": rep.ok})
    ok = all(r["ok"] for r in reports)
    text = "\n".join(f"== {r['query']['semantic']} / {r['query']['approach']}\n" + _ledger_text(r["ledger"])
                     for r in reports)
    _emit({"command": "check", "results": reports, "ok": ok}, args.format, text)
    return 0 if ok else 1


def cmd_identify(doc: SpecDocument, args) -> int:
    out = []
    for q in _queries(doc, args):
        ast = identify(_spec(doc, q, check=not args.no_check))
        fmt = "latexLike" if args.format == "latex" else "text"
        out.append({"query": q.to_json(), "formula": render_formula(ast, fmt), "ast": ast.to_json()})
    if args.format == "json":
        _emit({"command": "identify", "results": out, "ok": True}, "json", "")
    else:
        sys.stdout.write("\n".join(r["formula"] for r in out) + "\n")
    return 0


def read_csv(path: str, variables_domains: dict) -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise UsageError(f"{path}: empty CSV")
    head = rows[0]
    unknown = [h for h in head if h not in variables_domains]
    if unknown:
        raise UsageError(f"{path}: unknown columns {unknown}")
    doms = tuple(tuple(variables_domains[h]) for h in head)
    lookup = [{str(v): i for i, v in enumerate(d)} for d in doms]
    data = np.empty((len(rows) - 1, len(head)), dtype=np.int64)
    for r, row in enumerate(rows[1:]):
        for c, cell in enumerate(row):
            if cell not in lookup[c]:
                raise UsageError(f"{path}:{r + 2}: {cell!r} not in domain of {head[c]}")
            data[r, c] = lookup[c][cell]
    return Dataset(tuple(head), doms, data)


def cmd_estimate(doc: SpecDocument, args) -> int:
    out = []
    for q in _queries(doc, args):
        ast = identify(_spec(doc, q))
        base, osem, prov = _sems(doc, q, args.seed)
        src = base if ast.meta_dict.get("form") == "collapsed" and base is not None else osem
        if args.data:
            g = src.graph
            data = read_csv(args.data, {n: g.domain(n) for n in g.names})
            prov = f"csv:{os.path.basename(args.data)}"
        else:
            data = sample(src, args.n, args.seed)
        if args.export_csv:
            with open(args.export_csv, "w", encoding="utf-8") as fh:
                fh.write(data.to_csv())
        val = evaluate_plugin(ast, data, q.target, smoothing=args.smoothing)
        r = {"query": q.to_json(), "n": data.n, "seed": args.seed, "data": prov, "estimate": val}
        if q.contrast is not None:
            vb = evaluate_plugin(identify(_spec(doc, q, q.contrast)), data, q.target, smoothing=args.smoothing)
            r["contrast"] = {"labels": dict(q.contrast.assignment), "estimate": val - vb}
        out.append(r)
    text = "\n".join(
        f"{r['query']['semantic']}/{r['query']['approach']}: {r['estimate']:.6f} (n={r['n']}, {r['data']})"
        + (f"  contrast {r['contrast']['estimate']:+.6f}" if "contrast" in r else "")
        for r in out
    )
    _emit({"command": "estimate", "results": out, "ok": True}, args.format, text)
    return 0


def cmd_oracle(doc: SpecDocument, args) -> int:
    out = []
    for q in _queries(doc, args):
        _, osem, prov = _sems(doc, q, args.seed)
        r = {"query": q.to_json(), "sem": prov, "oracle": _oracle(q, osem, q.regime)}
        if q.contrast is not None:
            r["contrast"] = {"labels": dict(q.contrast.assignment),
                             "oracle": r["oracle"] - _oracle(q, osem, q.contrast)}
        out.append(r)
    text = "\n".join(f"{r['query']['semantic']}/{r['query']['approach']}: P(Y={r['query']['target']}) = "
                     f"{r['oracle']:.15g}" for r in out)
    _emit({"command": "oracle", "results": out, "ok": True}, args.format, text)
    return 0


def cmd_compare(doc: SpecDocument, args) -> int:
    results = [run_query(doc, q, args.seed, args.tol) for q in _queries(doc, args)]
    ok = all(r["ok"] for r in results)
    payload = {"command": "compare", "spec": os.path.basename(args.spec), "seed": args.seed, "tol": args.tol,
               "results": results, "ok": ok}
    if args.figure:
        from .report import deviation_figure

        deviation_figure(results, args.figure, args.tol)
    text = "\n\n".join(_result_text(r) for r in results) + f"\n\noverall: {'PASS' if ok else 'FAIL'}"
    _emit(payload, args.format, text)
    return 0 if ok else 1


COMMANDS = {
    "validate": cmd_validate,
    "swig": cmd_swig,
    "expand": cmd_expand,
    "check": cmd_check,
    "identify": cmd_identify,
    "estimate": cmd_estimate,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pseid", description="Path-specific effect identification toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, query=True, fmt=("text", "json")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("spec", help="spec file (or the name of a bundled spec, e.g. fig3)")
        sp.add_argument("--format", choices=fmt, default="text")
        sp.add_argument("--seed", type=int, default=0, help="seed for sampling and for random sems")
        if query:
            sp.add_argument("--semantic", choices=[s.value for s in Semantic])
            sp.add_argument("--approach", choices=[a.value for a in Approach], default="node")
            sp.add_argument("--labels", help="values in label order (1,0,1) or label:value pairs")
            sp.add_argument("--contrast", help="reference regime, same syntax as --labels")
            sp.add_argument("--target", help="outcome value (default: last domain value)")
            sp.add_argument("--nuisance", choices=["assumeAbsent", "weightObserved", "refuse"])
            sp.add_argument("--form", choices=["auto", "components", "collapsed"])
        return sp

    add("validate", "parse and validate a spec", query=False)
    sw = add("swig", "single-world intervention graph", query=False)
    sw.add_argument("--intervene", help="comma-separated nodes to split (default: exposure and mediators)")
    ex = add("expand", "expanded graph and dismissible conditions", query=False)
    ex.add_argument("--approach", choices=[a.value for a in Approach], default="node")
    add("check", "assumption ledger")
    idf = add("identify", "identification formula", fmt=("text", "json", "latex"))
    idf.add_argument("--no-check", action="store_true", help="skip the exchangeability check")
    es = add("estimate", "plug-in estimate on sampled or CSV data")
    es.add_argument("--n", type=int, default=10000)
    es.add_argument("--data", help="CSV with one column per observed variable")
    es.add_argument("--export-csv", help="write the dataset used to this CSV path")
    es.add_argument("--smoothing", type=float, default=0.0)
    add("oracle", "exact counterfactual / random-draw / component oracle")
    cp = add("compare", "formula vs oracle plus the assumption ledger")
    cp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    cp.add_argument("--figure", help="write a deviation bar chart (needs matplotlib)")
    return p


def _resolve_spec(path: str) -> str:
    if os.path.exists(path):
        return path
    from .dsl import bundled_specs

    name = os.path.basename(path)
    name = name[:-5] if name.endswith(".spec") else name
    specs = bundled_specs()
    if name in specs:
        return specs[name]
    raise UsageError(f"{path}: no such file or bundled spec ({', '.join(specs)})")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = "json" if getattr(args, "format", "text") == "json" else "text"
    path = args.spec
    doc = None
    try:
        path = _resolve_spec(args.spec)
        doc = parse_file(path)
        return COMMANDS[args.command](doc, args)
    except SpecError as e:
        return _fail(e, path, doc, None, fmt, 2)
    except UsageError as e:
        return _fail(e, path, doc, None, fmt, 2)
    except PseidError as e:
        return _fail(e, path, doc, _key_of(doc, args), fmt, 1)
    except (OSError, UnicodeDecodeError) as e:
        return _fail(e, path, doc, None, fmt, 2)


def _key_of(doc, args):
    """Position of the spec query matching the flags, for analysis diagnostics."""
    if doc is None:
        return None
    for i, q in enumerate(doc.queries):
        if getattr(args, "semantic", None) in (None, q.semantic) and getattr(args, "approach", q.approach) == q.approach:
            return ("query", i)
    return None


def _fail(e: Exception, path: str, doc, key, fmt: str, code: int) -> int:
    d = _diag(e, path, doc, key)
    if isinstance(e, OSError):
        d["message"] = f"{e.strerror or e}: {path}"
    sys.stderr.write(f"{d['path']}:{d['line']}:{d['col']}: {d['code']}: {d['message']}\n")
    if fmt == "json":
        payload = {"schema_version": SCHEMA_VERSION, "ok": False, "diagnostics": [d]}
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
