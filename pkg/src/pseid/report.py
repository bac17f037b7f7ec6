"""Optional deviation bar chart for ``compare`` results (needs matplotlib)."""

from __future__ import annotations

import math


def deviation_figure(results: list, path: str, tol: float = 1e-12) -> str:
    """Bar chart of |formula - oracle| per query on a log scale.

    ``results`` are the per-query dicts produced by ``pseid compare``.
    Returns the written path.
    """
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as e:  # pragma: no cover - depends on the environment
        raise RuntimeError("--figure needs matplotlib; install pseid[figures]") from e

    names, devs, colors = [], [], []
    for r in results:
        q = r["query"]
        names.append(f"{q['semantic']}\n{q['approach']}")
        d = r.get("deviation")
        devs.append(max(d, 1e-17) if d is not None else float("nan"))
        ok = r.get("ok", False)
        colors.append("#3b7d4f" if ok else "#b03a2e")

    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(names)), 3.2))
    xs = range(len(names))
    ax.bar(xs, devs, color=colors, width=0.6)
    ax.axhline(tol, color="0.4", lw=0.8, ls="--")
    ax.text(len(names) - 0.5, tol, f" tol {tol:g}", va="bottom", ha="right", fontsize=7, color="0.3")
    ax.set_yscale("log")
    finite = [d for d in devs if not math.isnan(d)]
    if finite:
        ax.set_ylim(1e-18, max(1.0, max(finite) * 10))
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, fontsize=7)
    ax.set_ylabel("|formula - oracle|", fontsize=8)
    ax.tick_params(axis="y", labelsize=7)
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
