"""Plot-data emission (exact TSV) and companion matplotlib figures.

The TSV carries the exact "p/q" strings used in reports; the figure is a
display-layer rendering (log10 positions computed from the big rationals
without going through floats that would underflow).
"""
from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .rational import Q


def log10_exact(q: Q) -> float:
    """log10 of a positive rational, safe for huge numerators/denominators."""
    if q <= 0:
        raise ValueError("log10 needs a positive rational")
    return math.log10(q.numerator) - math.log10(q.denominator)


def write_plot_data(path: str, rows: list[tuple[Q, Q]]) -> None:
    """Tab-separated (h, lambda(E,0,h)/h) rows, exact strings, h decreasing."""
    lines = ["h\tlambda_over_h"]
    lines += [f"{h}\t{ratio}" for h, ratio in rows]
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def default_figure_path(plot_path: str) -> str:
    stem, _ = os.path.splitext(plot_path)
    return stem + ".png"


def render_figure(
    path: str,
    rows: list[tuple[Q, Q]],
    estimate: Q | None = None,
    title: str = "gap ratio profile",
) -> None:
    """Render lambda/h against log10 h, with the deep estimate marked."""
    xs = [log10_exact(h) for h, _ in rows]
    ys = [float(ratio) for _, ratio in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(xs, ys, "o-", lw=1.2, ms=4, label="lambda(E,0,h)/h")
    if estimate is not None:
        # display layer rounds; the exact value lives in the TSV/report
        ax.axhline(
            float(estimate), color="crimson", ls="--", lw=1,
            label=f"deep estimate ~ {float(estimate):.6g}",
        )
    ax.set_xlabel("log10 h")
    ax.set_ylabel("largest relative gap in (0, h)")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(title)
    ax.legend(loc="best", fontsize=9)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
