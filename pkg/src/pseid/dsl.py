"""Line-oriented text format for graphs, sems and queries.

Statements, one per line (a brace block may continue over several lines)::

    node <name> role=<role> domain={v1,v2,...} [order=<j>] [observed=false] [of=<Z> label=<lbl>]
    edge A -> B [-> C ...]
    noise <node> [mode=shared|fresh] dist={p0,p1,...}
    mech <node> table{P1 P2 u: 0 0 0 -> 1; 0 0 1 -> 0; ...}
    cpt <node> [mode=shared|fresh] table{P1 P2: 0 0 -> 0.3 0.7; ...}
    cpt <node> [mode=...] dist={p0,p1,...}
    expand <V> [mode=sequential]
    query <semantic> <approach> labels={1,0,1} [contrast={0,0,0}] [nuisance=<n>] [target=<y>] [form=<f>]

``#`` starts a comment.  ``mech`` rows list parent values, then the noise
index ``u``, then the output value; the table must cover every row exactly
once.  A ``mech`` needs a ``noise`` statement for its noise law; a latent
node needs only ``noise``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .errors import GraphValidationError, PseidError, SpecSemanticError, SpecSyntaxError
from .expansion import ExpandedGraph, expand_node_intervened, expand_path_intervened, from_graph
from .graph import CausalGraph, NodeSpec, Role, validate_graph
from .regime import Approach, InterventionRegime, node_labels, path_labels
from .sem import DiscreteSem, Mechanism, NoiseMode, component_sem, mechanism_from_cpt, sem_graph_for_expansion

_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r]+)
      | (?P<comment>\#[^\n]*)
      | (?P<nl>\n)
      | (?P<arrow>->)
      | (?P<num>[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<punct>[{}:;,=])
    """,
    re.VERBOSE,
)

_ROLES = {r.value for r in Role}
_KEYWORDS = ("node", "edge", "noise", "mech", "cpt", "expand", "query")


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    out, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpecSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            out.append(Tok("nl", "\n", line, pos - start + 1))
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            out.append(Tok(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    return out


def _statements(tokens: list) -> list:
    """Group tokens into statements; newlines inside braces do not end one."""
    stmts, cur, depth, opened = [], [], 0, []
    for t in tokens:
        if t.kind == "nl" and depth == 0:
            if cur:
                stmts.append(cur)
            cur = []
            continue
        if t.kind == "nl":
            continue
        if t.text == "{":
            depth += 1
            opened.append(t)
        elif t.text == "}":
            depth -= 1
            if depth < 0:
                raise SpecSyntaxError("unbalanced '}'", t.line, t.col)
            opened.pop()
        cur.append(t)
    if depth:
        raise SpecSyntaxError("unclosed '{'", opened[-1].line, opened[-1].col)
    if cur:
        stmts.append(cur)
    return stmts


def _value(tok: Tok):
    if tok.kind == "num":
        f = float(tok.text)
        return int(f) if re.fullmatch(r"[-+]?\d+", tok.text) else f
    if tok.kind == "name":
        return tok.text
    raise SpecSyntaxError(f"expected a value, got {tok.text!r}", tok.line, tok.col)


class _Cursor:
    def __init__(self, toks: list):
        self.toks = toks
        self.i = 0

    def peek(self) -> Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what: str = "token") -> Tok:
        t = self.peek()
        if t is None:
            last = self.toks[-1]
            raise SpecSyntaxError(f"expected {what} at end of statement", last.line, last.col + len(last.text))
        self.i += 1
        return t

    def expect(self, text: str) -> Tok:
        t = self.next(repr(text))
        if t.text != text:
            raise SpecSyntaxError(f"expected {text!r}, got {t.text!r}", t.line, t.col)
        return t

    def name(self, what: str = "a name") -> Tok:
        t = self.next(what)
        if t.kind != "name":
            raise SpecSyntaxError(f"expected {what}, got {t.text!r}", t.line, t.col)
        return t

    def block(self) -> list:
        """Tokens strictly inside the next ``{...}``."""
        self.expect("{")
        depth, out = 1, []
        while True:
            t = self.next("'}'")
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth -= 1
                if depth == 0:
                    return out
            out.append(t)

    def done(self) -> bool:
        return self.i >= len(self.toks)


def _split(toks: list, sep: str) -> list:
    parts, cur = [], []
    for t in toks:
        if t.text == sep:
            parts.append(cur)
            cur = []
        else:
            cur.append(t)
    parts.append(cur)
    return parts


def _list(toks: list) -> tuple:
    if not toks:
        return ()
    out = []
    for part in _split(toks, ","):
        if len(part) != 1:
            t = part[0] if part else toks[0]
            raise SpecSyntaxError("expected one value between commas", t.line, t.col)
        out.append(_value(part[0]))
    return tuple(out)


# --- document -----------------------------------------------------------------


@dataclass(frozen=True)
class NoiseDecl:
    node: str
    dist: tuple
    mode: str | None = None


@dataclass(frozen=True)
class MechDecl:
    node: str
    header: tuple  # parents in column order
    rows: tuple  # ((parent values..., u), output)


@dataclass(frozen=True)
class CptDecl:
    node: str
    header: tuple
    rows: tuple  # ((parent values...), (p0, p1, ...))
    mode: str | None = None


@dataclass(frozen=True)
class ExpandDecl:
    node: str
    mode: str = "parallel"


@dataclass(frozen=True)
class QueryDecl:
    semantic: str
    approach: str
    labels: tuple  # ((label, value), ...)
    contrast: tuple = ()
    nuisance: str | None = None
    target: object = None
    form: str | None = None


@dataclass(frozen=True)
class SpecDocument:
    nodes: tuple
    edges: tuple
    noises: tuple = ()
    mechs: tuple = ()
    cpts: tuple = ()
    expands: tuple = ()
    queries: tuple = ()
    positions: dict = field(default_factory=dict, compare=False, repr=False)

    def pos(self, *key) -> tuple:
        return self.positions.get(tuple(key), (1, 1))

    @property
    def has_sem(self) -> bool:
        return bool(self.noises or self.mechs or self.cpts)

    @property
    def is_expanded(self) -> bool:
        return any(n.role is Role.COMPONENT for n in self.nodes)

    @cached_property
    def graph(self) -> CausalGraph:
        try:
            return validate_graph(self.nodes, self.edges, expanded=self.is_expanded)
        except GraphValidationError as e:
            raise self._graph_error(e) from None

    def _graph_error(self, e: GraphValidationError) -> SpecSemanticError:
        prio = ["MissingExposure", "MissingOutcome"]
        vs = sorted(e.violations, key=lambda v: prio.index(v.code) if v.code in prio else len(prio))
        v = vs[0]
        line, col = 1, 1
        names = re.findall(r"'([^']+)'", v.message)
        edge = re.search(r"edge (\S+)->(\S+)", v.message)
        if edge and ("edge", edge.group(1), edge.group(2)) in self.positions:
            line, col = self.pos("edge", edge.group(1), edge.group(2))
        elif names and ("node", names[0]) in self.positions:
            line, col = self.pos("node", names[0])
        msg = "; ".join(f"{x.code}: {x.message}" for x in vs)
        return SpecSemanticError(msg, line, col, v.code)

    # sem ----------------------------------------------------------------------

    @cached_property
    def sem(self) -> DiscreteSem | None:
        """Sem over the declared graph; ``None`` when no sem statements are given."""
        if not self.has_sem:
            return None
        g = self.graph
        noises = {d.node: d for d in self.noises}
        mechs = {d.node: d for d in self.mechs}
        cpts = {d.node: d for d in self.cpts}
        out, lats = {}, {}
        for name in g.topo:
            spec = g.node(name)
            line, col = self.pos("node", name)
            if spec.role is Role.LATENT:
                if name not in noises:
                    raise SpecSemanticError(f"latent {name!r} needs a noise distribution", line, col, "MissingNoise")
                lats[name] = self._dist(noises[name].dist, len(spec.domain), ("noise", name))
                continue
            if name in mechs and name in cpts:
                raise SpecSemanticError(f"{name!r} has both mech and cpt", *self.pos("cpt", name), "DuplicateMechanism")
            if name in mechs:
                out[name] = self._mech(g, mechs[name], noises.get(name))
            elif name in cpts:
                out[name] = self._cpt(g, cpts[name])
            elif spec.role is Role.COMPONENT and g.parents(name) == (spec.component_of,):
                n = len(spec.domain)
                out[name] = Mechanism((spec.component_of,), (1.0,), np.arange(n)[:, None])
            else:
                raise SpecSemanticError(f"node {name!r} has no mech or cpt", line, col, "MissingMechanism")
        for d in self.noises:
            if d.node not in g:
                raise SpecSemanticError(f"noise for unknown node {d.node!r}", *self.pos("noise", d.node), "UnknownNode")
        try:
            return DiscreteSem(g, out, lats)
        except PseidError as e:
            raise SpecSemanticError(str(e), 1, 1, "InvalidSem") from None

    def _dist(self, dist: tuple, k: int, key: tuple) -> tuple:
        line, col = self.pos(*key)
        if len(dist) != k:
            raise SpecSemanticError(f"distribution has {len(dist)} entries, expected {k}", line, col, "BadDistribution")
        if min(dist) < 0 or abs(sum(dist) - 1) > 1e-9:
            raise SpecSemanticError("distribution must be nonnegative and sum to 1", line, col, "BadDistribution")
        return tuple(float(x) for x in dist)

    def _header(self, g: CausalGraph, node: str, header: tuple, key: tuple) -> None:
        line, col = self.pos(*key)
        if node not in g:
            raise SpecSemanticError(f"unknown node {node!r}", line, col, "UnknownNode")
        if tuple(sorted(header)) != g.parents(node):
            raise SpecSemanticError(
                f"table header {list(header)} must list the parents of {node} {list(g.parents(node))}",
                line, col, "BadTable",
            )

    def _index(self, g: CausalGraph, var: str, value, key: tuple) -> int:
        dom = g.domain(var)
        if value not in dom:
            raise SpecSemanticError(f"{value!r} not in domain of {var}", *self.pos(*key), "ValueOutOfDomain")
        return dom.index(value)

    def _mech(self, g: CausalGraph, d: MechDecl, noise: NoiseDecl | None) -> Mechanism:
        key = ("mech", d.node)
        self._header(g, d.node, d.header, key)
        if noise is None:
            raise SpecSemanticError(f"mech {d.node!r} needs a noise statement", *self.pos(*key), "MissingNoise")
        if not noise.dist or min(noise.dist) < 0 or abs(sum(noise.dist) - 1) > 1e-9:
            raise SpecSemanticError("noise distribution must sum to 1", *self.pos("noise", d.node), "BadDistribution")
        k = len(noise.dist)
        shape = tuple(len(g.domain(p)) for p in d.header) + (k,)
        table = np.full(shape, -1, dtype=np.int64)
        for vals, outv in d.rows:
            if len(vals) != len(d.header) + 1:
                raise SpecSemanticError(f"row {vals} needs {len(d.header) + 1} entries", *self.pos(*key), "BadTable")
            idx = tuple(self._index(g, p, v, key) for p, v in zip(d.header, vals[:-1]))
            u = vals[-1]
            if not isinstance(u, int) or not 0 <= u < k:
                raise SpecSemanticError(f"noise index {u!r} outside 0..{k - 1}", *self.pos(*key), "BadTable")
            if table[idx + (u,)] != -1:
                raise SpecSemanticError(f"row {vals} listed twice", *self.pos(*key), "BadTable")
            table[idx + (u,)] = self._index(g, d.node, outv, key)
        if (table < 0).any():
            miss = np.argwhere(table < 0)[0]
            raise SpecSemanticError(f"mechanism of {d.node} is not total; missing row index {tuple(int(i) for i in miss)}",
                                    *self.pos(*key), "BadTable")
        return Mechanism(d.header, noise.dist, table, NoiseMode(noise.mode or "fresh"))

    def _cpt(self, g: CausalGraph, d: CptDecl) -> Mechanism:
        key = ("cpt", d.node)
        self._header(g, d.node, d.header, key)
        k = len(g.domain(d.node))
        shape = tuple(len(g.domain(p)) for p in d.header)
        cpt = np.full(shape + (k,), np.nan)
        for vals, probs in d.rows:
            if len(vals) != len(d.header):
                raise SpecSemanticError(f"row {vals} needs {len(d.header)} parent values", *self.pos(*key), "BadTable")
            idx = tuple(self._index(g, p, v, key) for p, v in zip(d.header, vals))
            if not np.isnan(cpt[idx]).all():
                raise SpecSemanticError(f"row {vals} listed twice", *self.pos(*key), "BadTable")
            cpt[idx] = self._dist(probs, k, key)
        if np.isnan(cpt).any():
            raise SpecSemanticError(f"cpt of {d.node} is not total", *self.pos(*key), "BadTable")
        return mechanism_from_cpt(cpt, d.header, NoiseMode(d.mode or "fresh"))

    # expansions ------------------------------------------------------------------

    @property
    def sequential(self) -> bool:
        return any(e.mode == "sequential" for e in self.expands)

    def base_expanded(self, approach=Approach.NODE) -> ExpandedGraph:
        """Wrap a graph declared already expanded (exposure node stripped)."""
        g = self.graph
        comps = g.components
        z = g.exposure
        if z is None:
            return from_graph(g, approach)
        bad = [c for c in comps if g.parents(c) != (z,)]
        if bad:
            raise SpecSemanticError(f"components {bad} must have the exposure as their only parent",
                                    *self.pos("node", bad[0]), "BadComponent")
        nodes = [n for n in g.nodes if n.name != z]
        edges = [(a, b) for a, b in g.edges if z not in (a, b)]
        edges += [(p, c) for p in g.parents(z) for c in comps]
        return from_graph(validate_graph(nodes, edges, expanded=True), approach)

    def expansion(self, approach) -> ExpandedGraph:
        approach = Approach(approach)
        if self.is_expanded:
            return self.base_expanded(approach)
        g = self.graph
        for e in self.expands:
            if e.node not in g.confounders:
                raise SpecSemanticError(f"{e.node!r} is not an exposure-induced confounder",
                                        *self.pos("expand", e.node), "NotAConfounder")
        if approach is Approach.NODE:
            return expand_node_intervened(g, sequential=self.sequential)
        return expand_path_intervened(g)

    def component_sem(self, eg: ExpandedGraph, coupling: str = "independent") -> DiscreteSem | None:
        if self.sem is None:
            return None
        if self.is_expanded:
            return DiscreteSem(sem_graph_for_expansion(eg), self.sem.mechanisms, self.sem.latents)
        return component_sem(self.sem, eg, coupling)

    # queries ---------------------------------------------------------------------

    def regime(self, approach, labels, key=None) -> InterventionRegime:
        """Regime from ``((label, value), ...)`` or a plain value list in label order."""
        approach = Approach(approach)
        g = self.graph
        if self.is_expanded:
            want = tuple(sorted(g.node(c).label for c in g.components))
        else:
            want = node_labels(g.p) if approach is Approach.NODE else path_labels(g.p)
        pos = self.pos(*key) if key else (1, 1)
        if labels and all(isinstance(x, tuple) for x in labels):
            mapping = {str(k): v for k, v in labels}
        else:
            if len(labels) != len(want):
                raise SpecSemanticError(f"expected {len(want)} label values ({','.join('z' + w for w in want)}), "
                                        f"got {len(labels)}", *pos, "MissingLabel")
            mapping = dict(zip(want, labels))
        if set(mapping) != set(want):
            raise SpecSemanticError(f"labels {sorted(mapping)} != {sorted(want)}", *pos, "MissingLabel")
        zdom = g.domain(g.components[0]) if self.is_expanded else g.domain(g.exposure)
        for k, v in mapping.items():
            if v not in zdom:
                raise SpecSemanticError(f"z{k}={v!r} outside the exposure domain", *pos, "ValueOutOfDomain")
        return InterventionRegime(approach, mapping)


# --- parsing --------------------------------------------------------------------


def _kv(cur: _Cursor, allowed: dict, stmt: str) -> dict:
    """``key=value`` pairs; ``allowed`` maps key -> 'atom' | 'block'."""
    out = {}
    while not cur.done():
        k = cur.name("a key")
        if k.text not in allowed:
            raise SpecSyntaxError(f"unknown {stmt} attribute {k.text!r}", k.line, k.col)
        if k.text in out:
            raise SpecSyntaxError(f"duplicate attribute {k.text!r}", k.line, k.col)
        if allowed[k.text] == "table":
            out[k.text] = (k, cur.block())
            continue
        cur.expect("=")
        if allowed[k.text] == "block":
            out[k.text] = (k, cur.block())
        elif allowed[k.text] == "raw":
            out[k.text] = (k, cur.next("a value").text)
        else:
            out[k.text] = (k, _value(cur.next("a value")))
    return out


def _table_parts(k: Tok, toks: list) -> tuple:
    head, sep, body = [], None, []
    for i, t in enumerate(toks):
        if t.text == ":":
            sep = i
            break
        if t.kind != "name":
            raise SpecSyntaxError(f"table header expects names, got {t.text!r}", t.line, t.col)
        head.append(t.text)
    if sep is None:
        raise SpecSyntaxError("table needs 'header: rows'", k.line, k.col)
    body = toks[sep + 1:]
    rows = []
    for part in _split(body, ";"):
        if not part:
            continue
        arrow = [i for i, t in enumerate(part) if t.kind == "arrow"]
        if len(arrow) != 1:
            raise SpecSyntaxError("each table row needs one '->'", part[0].line, part[0].col)
        a = arrow[0]
        lhs = tuple(_value(t) for t in part[:a])
        rhs = tuple(_value(t) for t in part[a + 1:] if t.text != ",")
        if not rhs:
            raise SpecSyntaxError("row has no output", part[a].line, part[a].col)
        rows.append((lhs, rhs, part[0]))
    return tuple(head), rows


def _labels_block(toks: list) -> tuple:
    if any(t.text == ":" for t in toks):
        out = []
        for part in _split(toks, ","):
            if len(part) != 3 or part[1].text != ":":
                t = part[0] if part else toks[0]
                raise SpecSyntaxError("expected label:value", t.line, t.col)
            out.append((part[0].text, _value(part[2])))
        return tuple(out)
    return _list(toks)


def parse_spec(text: str) -> SpecDocument:
    """Parse and validate a spec; errors carry 1-based line/column positions."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    pos: dict = {}
    nodes, edges, noises, mechs, cpts, expands, queries = [], [], [], [], [], [], []
    for st in _statements(_tokenize(text)):
        cur = _Cursor(st)
        kw = cur.name("a statement keyword")
        if kw.text not in _KEYWORDS:
            raise SpecSyntaxError(f"unknown statement {kw.text!r}", kw.line, kw.col)
        here = (kw.line, kw.col)
        if kw.text == "node":
            name = cur.name("a node name")
            kv = _kv(cur, {"role": "atom", "domain": "block", "order": "atom", "observed": "atom",
                           "of": "raw", "label": "raw"}, "node")
            if "role" not in kv:
                raise SpecSyntaxError(f"node {name.text} needs role=", name.line, name.col)
            rtok, role = kv["role"]
            if role not in _ROLES:
                raise SpecSyntaxError(f"unknown role {role!r}", rtok.line, rtok.col)
            domain = _list(kv["domain"][1]) if "domain" in kv else (0, 1)
            observed = kv.get("observed", (None, "true"))[1]
            if observed not in ("true", "false"):
                t = kv["observed"][0]
                raise SpecSyntaxError("observed must be true or false", t.line, t.col)
            label = kv.get("label", (None, None))[1]
            nodes.append(NodeSpec(
                name.text, Role(role), domain, kv.get("order", (None, None))[1], observed == "true",
                kv.get("of", (None, None))[1], None if label is None else str(label),
            ))
            pos[("node", name.text)] = (name.line, name.col)
        elif kw.text == "edge":
            chain = [cur.name("a node name")]
            while not cur.done():
                t = cur.next()
                if t.kind != "arrow":
                    raise SpecSyntaxError(f"expected '->', got {t.text!r}", t.line, t.col)
                chain.append(cur.name("a node name"))
            if len(chain) < 2:
                raise SpecSyntaxError("edge needs 'A -> B'", kw.line, kw.col)
            for a, b in zip(chain, chain[1:]):
                edges.append((a.text, b.text))
                pos[("edge", a.text, b.text)] = (a.line, a.col)
        elif kw.text == "noise":
            name = cur.name("a node name")
            kv = _kv(cur, {"mode": "atom", "dist": "block"}, "noise")
            if "dist" not in kv:
                raise SpecSyntaxError("noise needs dist={...}", name.line, name.col)
            mode = _mode(kv)
            noises.append(NoiseDecl(name.text, tuple(float(x) for x in _list(kv["dist"][1])), mode))
            pos[("noise", name.text)] = (name.line, name.col)
        elif kw.text == "mech":
            name = cur.name("a node name")
            kv = _kv(cur, {"table": "table"}, "mech")
            if "table" not in kv:
                raise SpecSyntaxError("mech needs table{...}", name.line, name.col)
            head, rows = _table_parts(*kv["table"])
            if not head or head[-1] != "u":
                k = kv["table"][0]
                raise SpecSyntaxError("mech table header must end with the noise column 'u'", k.line, k.col)
            for lhs, rhs, t in rows:
                if len(rhs) != 1:
                    raise SpecSyntaxError("mech rows map to a single value", t.line, t.col)
            mechs.append(MechDecl(name.text, head[:-1], tuple((lhs, rhs[0]) for lhs, rhs, _ in rows)))
            pos[("mech", name.text)] = (name.line, name.col)
        elif kw.text == "cpt":
            name = cur.name("a node name")
            kv = _kv(cur, {"mode": "atom", "table": "table", "dist": "block"}, "cpt")
            mode = _mode(kv)
            if "dist" in kv:
                rows = (((), tuple(float(x) for x in _list(kv["dist"][1]))),)
                head = ()
            elif "table" in kv:
                head, raw = _table_parts(*kv["table"])
                rows = tuple((lhs, tuple(float(x) for x in rhs)) for lhs, rhs, _ in raw)
            else:
                raise SpecSyntaxError("cpt needs table{...} or dist={...}", name.line, name.col)
            cpts.append(CptDecl(name.text, head, rows, mode))
            pos[("cpt", name.text)] = (name.line, name.col)
        elif kw.text == "expand":
            name = cur.name("a node name")
            kv = _kv(cur, {"mode": "atom"}, "expand")
            mode = kv.get("mode", (None, "parallel"))
            if mode[1] not in ("parallel", "sequential"):
                raise SpecSyntaxError("expand mode must be parallel or sequential", mode[0].line, mode[0].col)
            expands.append(ExpandDecl(name.text, mode[1]))
            pos[("expand", name.text)] = (name.line, name.col)
        else:
            sem_t = cur.name("a semantic")
            app_t = cur.name("an approach")
            if sem_t.text not in ("classical", "interventional", "separable"):
                raise SpecSyntaxError(f"unknown semantic {sem_t.text!r}", sem_t.line, sem_t.col)
            if app_t.text not in ("node", "path"):
                raise SpecSyntaxError(f"unknown approach {app_t.text!r}", app_t.line, app_t.col)
            kv = _kv(cur, {"labels": "block", "contrast": "block", "nuisance": "atom", "target": "atom",
                           "form": "atom"}, "query")
            if "labels" not in kv:
                raise SpecSyntaxError("query needs labels={...}", kw.line, kw.col)
            nuis = kv.get("nuisance", (None, None))
            if nuis[1] not in (None, "assumeAbsent", "weightObserved", "refuse"):
                raise SpecSyntaxError(f"unknown nuisance policy {nuis[1]!r}", nuis[0].line, nuis[0].col)
            form = kv.get("form", (None, None))
            if form[1] not in (None, "auto", "components", "collapsed"):
                raise SpecSyntaxError(f"unknown form {form[1]!r}", form[0].line, form[0].col)
            queries.append(QueryDecl(
                sem_t.text, app_t.text, _labels_block(kv["labels"][1]),
                _labels_block(kv["contrast"][1]) if "contrast" in kv else (),
                nuis[1], kv.get("target", (None, None))[1], form[1],
            ))
            pos[("query", len(queries) - 1)] = here
    doc = SpecDocument(tuple(nodes), tuple(edges), tuple(noises), tuple(mechs), tuple(cpts),
                       tuple(expands), tuple(queries), pos)
    _validate(doc)
    return doc


def _mode(kv: dict) -> str | None:
    if "mode" not in kv:
        return None
    t, m = kv["mode"]
    if m not in ("shared", "fresh"):
        raise SpecSyntaxError("noise mode must be shared or fresh", t.line, t.col)
    return m


def _validate(doc: SpecDocument) -> None:
    doc.graph
    doc.sem
    for d in doc.expands:
        if d.node not in doc.graph.names:
            raise SpecSemanticError(f"unknown node {d.node!r}", *doc.pos("expand", d.node), "UnknownNode")
    for i, q in enumerate(doc.queries):
        doc.regime(q.approach, q.labels, ("query", i))
        if q.contrast:
            doc.regime(q.approach, q.contrast, ("query", i))
        if q.target is not None and q.target not in doc.graph.domain(doc.graph.outcome):
            raise SpecSemanticError(f"target {q.target!r} outside the outcome domain", *doc.pos("query", i),
                                    "ValueOutOfDomain")


def parse_file(path) -> SpecDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


# --- serialization --------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _block(vals) -> str:
    return "{" + ",".join(_fmt(v) for v in vals) + "}"


def _labels_text(labels: tuple) -> str:
    if labels and all(isinstance(x, tuple) for x in labels):
        return "{" + ",".join(f"{k}:{_fmt(v)}" for k, v in labels) + "}"
    return _block(labels)


def serialize(doc: SpecDocument) -> str:
    """Canonical text; ``parse_spec(serialize(doc)) == doc``."""
    out = []
    for n in doc.nodes:
        s = f"node {n.name} role={n.role.value} domain={_block(n.domain)}"
        if n.order is not None:
            s += f" order={n.order}"
        if not n.observed:
            s += " observed=false"
        if n.component_of:
            s += f" of={n.component_of}"
        if n.label is not None:
            s += f" label={n.label}"
        out.append(s)
    out += [f"edge {a} -> {b}" for a, b in doc.edges]
    for d in doc.noises:
        mode = f" mode={d.mode}" if d.mode else ""
        out.append(f"noise {d.node}{mode} dist={_block(d.dist)}")
    for d in doc.mechs:
        rows = "; ".join(" ".join(map(_fmt, lhs)) + f" -> {_fmt(v)}" for lhs, v in d.rows)
        out.append(f"mech {d.node} table{{{' '.join(d.header + ('u',))}: {rows}}}")
    for d in doc.cpts:
        mode = f" mode={d.mode}" if d.mode else ""
        if not d.header and len(d.rows) == 1 and not d.rows[0][0]:
            out.append(f"cpt {d.node}{mode} dist={_block(d.rows[0][1])}")
            continue
        rows = "; ".join(" ".join(map(_fmt, lhs)) + " -> " + " ".join(map(_fmt, p)) for lhs, p in d.rows)
        out.append(f"cpt {d.node}{mode} table{{{' '.join(d.header)}: {rows}}}")
    for d in doc.expands:
        out.append(f"expand {d.node} mode={d.mode}")
    for q in doc.queries:
        s = f"query {q.semantic} {q.approach} labels={_labels_text(q.labels)}"
        if q.contrast:
            s += f" contrast={_labels_text(q.contrast)}"
        for k in ("nuisance", "target", "form"):
            v = getattr(q, k)
            if v is not None:
                s += f" {k}={_fmt(v)}"
        out.append(s)
    return "\n".join(out) + "\n"


def bundled_specs() -> dict:
    """Name -> path of the example specs shipped with the package."""
    from importlib import resources

    root = resources.files("pseid") / "data"
    return {p.name[:-5]: str(p) for p in sorted(root.iterdir(), key=lambda p: p.name) if p.name.endswith(".spec")}
