"""Regenerate the bundled example specs (parameters are rounded random draws)."""

import sys
from itertools import product
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "pseid" / "data"


def cpt_line(rng, node, parents, mode=None, k=2, lo=0.1):
    mode_s = f" mode={mode}" if mode else ""
    if not parents:
        p = round(float(rng.uniform(0.3, 0.7)), 2)
        return f"cpt {node}{mode_s} dist={{{round(1 - p, 2)},{p}}}"
    rows = []
    for vals in product(range(2), repeat=len(parents)):
        p = round(float(rng.uniform(lo, 1 - lo)), 2)
        rows.append(" ".join(map(str, vals)) + f" -> {round(1 - p, 2)} {p}")
    return f"cpt {node}{mode_s} table{{{' '.join(parents)}: " + "; ".join(rows) + "}"


def write(name, header, nodes, edges, cpts, extra):
    lines = [f"# {header}"] + nodes + [f"edge {a} -> {b}" for a, b in edges] + cpts + extra
    (OUT / f"{name}.spec").write_text("\n".join(lines) + "\n")


def two_mediator(name, header, seed, v=False, modes=None, queries=(), extra_nodes=()):
    rng = np.random.default_rng(seed)
    modes = modes or {}
    nodes = [
        "node C role=baseline domain={0,1}",
        "node Z role=exposure domain={0,1}",
        "node M2 role=mediator order=2 domain={0,1}",
        "node M1 role=mediator order=1 domain={0,1}",
        "node Y role=outcome domain={0,1}",
    ]
    edges = [("C", "Z"), ("C", "M2"), ("C", "Y"), ("Z", "M2"), ("Z", "M1"), ("Z", "Y"),
             ("M2", "M1"), ("M2", "Y"), ("M1", "Y")]
    parents = {"C": [], "Z": ["C"], "M2": ["C", "Z"], "M1": ["M2", "Z"], "Y": ["C", "M1", "M2", "Z"]}
    if v:
        nodes.insert(2, "node V role=confounder domain={0,1}")
        edges += [("Z", "V"), ("C", "V"), ("V", "M2"), ("V", "M1"), ("V", "Y")]
        parents["V"] = ["C", "Z"]
        for x in ("M2", "M1", "Y"):
            parents[x] = sorted(parents[x] + ["V"])
    order = ["C", "Z"] + (["V"] if v else []) + ["M2", "M1", "Y"]
    cpts = [cpt_line(rng, x, parents[x], modes.get(x), lo=0.05) for x in order]
    write(name, header, nodes, edges, cpts, list(queries))


def generic(name, header, seed, nodes, edges, queries, skip=(), modes=None, extra=()):
    """Cpts for every node listed in ``nodes`` (topological order) except ``skip``."""
    rng = np.random.default_rng(seed)
    modes = modes or {}
    names = [ln.split()[1] for ln in nodes]
    parents = {x: sorted(a for a, b in edges if b == x) for x in names}
    cpts = [cpt_line(rng, x, parents[x], modes.get(x), lo=0.05) for x in names if x not in skip]
    write(name, header, nodes, edges, cpts, list(extra) + list(queries))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    two_mediator("fig3", "two-mediator model, world-fresh noise everywhere", 3, queries=[
        "query classical node labels={1,0,1} contrast={0,0,0}",
        "query classical path labels={1,0,1,0} contrast={0,0,0,0}",
        "query interventional node labels={1,0,1}",
        "query interventional path labels={1,0,1,0}",
        "query separable node labels={1,0,1}",
        "query separable path labels={1,0,1,0}",
    ])
    two_mediator("fig3_uv", "exposure-induced confounder V with world-shared noise (weak cross-world independence fails)",
                 int(sys.argv[1]) if len(sys.argv) > 1 else 11, v=True, modes={"V": "shared"}, queries=[
        "query classical node labels={1,0,1}",
        "query interventional node labels={1,0,1}",
    ])
    two_mediator("fig3_um2", "world-shared noise on M2 (strong cross-world independence fails)",
                 int(sys.argv[2]) if len(sys.argv) > 2 else 12, modes={"M2": "shared"}, queries=[
        "query classical path labels={1,0,1,0}",
        "query interventional path labels={1,0,1,0}",
    ])
    # competing events, written down already expanded; Va and Vb are ordinary confounders
    generic("fig6", "competing events: expanded graph with components Za (outcome side) and Zb (competing side)", 6, [
        "node Z role=exposure domain={0,1}",
        "node Za role=component domain={0,1} of=Z label=a",
        "node Zb role=component domain={0,1} of=Z label=b",
        "node M1 role=mediator order=4 domain={0,1}",
        "node Y1 role=mediator order=3 domain={0,1}",
        "node Vb role=confounder domain={0,1}",
        "node Va role=confounder domain={0,1}",
        "node M2 role=mediator order=1 domain={0,1}",
        "node Y2 role=outcome domain={0,1}",
    ], [("Z", "Za"), ("Z", "Zb"), ("Zb", "M1"), ("Za", "Y1"), ("M1", "Y1"),
        ("Zb", "Vb"), ("M1", "Vb"), ("Y1", "Vb"),
        ("Za", "Va"), ("M1", "Va"), ("Y1", "Va"), ("Vb", "Va"),
        ("Zb", "M2"), ("M1", "M2"), ("Y1", "M2"), ("Va", "M2"), ("Vb", "M2"),
        ("Za", "Y2"), ("M2", "Y2"), ("Y1", "Y2"), ("Va", "Y2"), ("Vb", "Y2")],
        ["query separable node labels={a:1,b:0}"], skip=("Za", "Zb"))
    generic("fig8", "exposure-induced confounder split into sequentially ordered components", 8, [
        "node C role=baseline domain={0,1}",
        "node Z role=exposure domain={0,1}",
        "node V role=confounder domain={0,1}",
        "node M2 role=mediator order=2 domain={0,1}",
        "node M1 role=mediator order=1 domain={0,1}",
        "node Y role=outcome domain={0,1}",
    ], [("C", "Z"), ("C", "V"), ("C", "Y"), ("Z", "V"), ("Z", "M2"), ("Z", "M1"), ("Z", "Y"),
        ("V", "M2"), ("V", "M1"), ("V", "Y"), ("M2", "M1"), ("M2", "Y"), ("M1", "Y")],
        ["query separable node labels={1,0,1}", "query interventional node labels={1,0,1}"],
        extra=["expand V mode=sequential"])
    rng = np.random.default_rng(10)
    m2 = cpt_line(rng, "M2_10", ["C", "Z10"], lo=0.05)
    generic("fig10", "path-intervened expanded graph; M2 split into M2_10 and M2_11 with one shared table", 10, [
        "node C role=baseline domain={0,1}",
        "node Z role=exposure domain={0,1}",
        "node Z00 role=component domain={0,1} of=Z label=00",
        "node Z01 role=component domain={0,1} of=Z label=01",
        "node Z10 role=component domain={0,1} of=Z label=10",
        "node Z11 role=component domain={0,1} of=Z label=11",
        "node M2_10 role=mediator order=3 domain={0,1} of=M2 label=10",
        "node M2_11 role=mediator order=2 domain={0,1} of=M2 label=11",
        "node M1 role=mediator order=1 domain={0,1}",
        "node Y role=outcome domain={0,1}",
    ], [("C", "Z"), ("Z", "Z00"), ("Z", "Z01"), ("Z", "Z10"), ("Z", "Z11"),
        ("C", "M2_10"), ("Z10", "M2_10"), ("C", "M2_11"), ("Z11", "M2_11"),
        ("Z01", "M1"), ("M2_11", "M1"), ("C", "Y"), ("Z00", "Y"), ("M1", "Y"), ("M2_10", "Y")],
        ["query separable path labels={00:1,01:0,10:1,11:0}"],
        skip=("Z00", "Z01", "Z10", "Z11", "M2_10", "M2_11"),
        extra=[m2, m2.replace("M2_10", "M2_11").replace("Z10", "Z11")])
    generic("fig12", "immunotherapy toy: dose A, TCR activation T, EGFR activation E, cell lysis C", 12, [
        "node A role=exposure domain={0,1}",
        "node T role=mediator order=2 domain={0,1}",
        "node E role=mediator order=1 domain={0,1}",
        "node C role=outcome domain={0,1}",
    ], [("A", "T"), ("T", "C"), ("A", "E"), ("E", "C"), ("T", "E"), ("A", "C")],
        ["query classical node labels={0,1,0} contrast={0,0,0}",
         "query classical path labels={0,1,0,0} contrast={0,0,0,0}",
         "query interventional node labels={0,1,0}",
         "query separable node labels={0,1,0}"])


if __name__ == "__main__":
    main()
