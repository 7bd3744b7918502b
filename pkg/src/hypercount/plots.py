"""Matplotlib figures for the CLI's ``--figures DIR`` option.

Figures are written with the Agg backend so no display is needed; every
function returns the path it wrote.
"""
from __future__ import annotations

import os
from typing import Iterable, Mapping, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 3.8),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
    "legend.fontsize": 8,
    "legend.frameon": False,
}


def _save(fig, directory: str, name: str) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, name)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def depth_convergence(levels: Sequence[Tuple[int, float]], exact_log2: float | None,
                      directory: str, name: str = "count_levels.png") -> str:
    """log2 of the estimate at each truncation depth, with the exact value if known."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot([L for L, _ in levels], [v for _, v in levels], "o-", label="estimate")
        if exact_log2 is not None:
            ax.axhline(exact_log2, color="k", ls="--", lw=1, label="exact")
        ax.set_xlabel("truncation depth L")
        ax.set_ylabel("log2 Z")
        ax.legend()
        return _save(fig, directory, name)


def level_gaps(gaps: Sequence[float], title: str, directory: str,
               name: str = "level_gap.png") -> str:
    """Semilog plot of |p_{n+1} - p_n| against the level n."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.semilogy(range(len(gaps)), [max(g, 1e-300) for g in gaps], lw=1)
        ax.set_xlabel("level n")
        ax.set_ylabel("|p(n+1) - p(n)|")
        ax.set_title(title)
        return _save(fig, directory, name)


def derivative_vs_degree(rows: Iterable[Tuple[int, float]], k: int, directory: str,
                         name: str = "fprime_vs_delta.png") -> str:
    """|f'(x)| at the fixed point as the degree grows, against the threshold 1."""
    rows = list(rows)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot([d for d, _ in rows], [v for _, v in rows], "o-", ms=3)
        ax.axhline(1.0, color="k", ls="--", lw=1)
        ax.set_xlabel("Delta")
        ax.set_ylabel("|f'(x)|")
        ax.set_title(f"k = {k}")
        return _save(fig, directory, name)


def kappa_by_d(per_d: Mapping[int, float], bound: float, directory: str,
               name: str = "kappa_max.png") -> str:
    """Largest kappa* found for each clause count d."""
    ds = sorted(per_d)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar(ds, [per_d[d] for d in ds], color="tab:blue")
        if bound < float("inf"):
            ax.axhline(bound, color="k", ls="--", lw=1)
        ax.set_xticks(ds)
        ax.set_xlabel("d")
        ax.set_ylabel("max kappa*")
        return _save(fig, directory, name)


def registry_slack(names: Sequence[str], slacks: Sequence[float], passed: Sequence[bool],
                   directory: str, name: str = "registry_slack.png") -> str:
    """Horizontal bars of each check's slack (distance to its bound)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.0, max(3.0, 0.18 * len(names))))
        colors = ["tab:green" if p else "tab:red" for p in passed]
        ax.barh(range(len(names)), [max(s, 1e-16) for s in slacks], color=colors)
        ax.set_xscale("log")
        ax.set_yticks(range(len(names)))
        ax.set_yticklabels(names, fontsize=6)
        ax.invert_yaxis()
        ax.set_xlabel("slack to bound")
        return _save(fig, directory, name)


def bench_times(labels: Sequence[str], times_ms: Sequence[float], directory: str,
                name: str = "bench.png") -> str:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.barh(labels, times_ms, color="tab:gray")
        ax.set_xscale("log")
        ax.set_xlabel("wall time (ms)")
        ax.invert_yaxis()
        return _save(fig, directory, name)
