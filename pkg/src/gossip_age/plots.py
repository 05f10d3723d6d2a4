"""Figure rendering for sweep and scaling reports.

Figures are written to files next to the delimited output (Agg backend,
no display needed).  The CSV/JSON artifacts remain the machine-readable
record; figures are a human-readable companion and are not byte-stable.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .optimize import ScalingFit, SweepResult

_TOPOLOGY_LABEL = {
    "disconnected": "disconnected",
    "uniring": "uni-directional ring",
    "biring": "bi-directional ring",
    "full": "fully connected",
}


def figure_path(out_path: str | Path, suffix: str = "") -> Path:
    """Sibling .png path for a delimited output file."""
    out = Path(out_path)
    stem = out.stem + (f"_{suffix}" if suffix else "")
    return out.with_name(stem + ".png")


def save_sweep_figure(sweeps: Sequence[tuple[str, SweepResult]], path: str | Path,
                      title: str | None = None) -> Path:
    """Node age versus cluster size, one curve per labeled sweep.

    Minima are marked; the x axis is logarithmic because divisor grids
    span the full range 1..n.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, sweep in sweeps:
        ks = [p.k for p in sweep.points]
        ages = [p.node_age for p in sweep.points]
        [line] = ax.plot(ks, ages, marker="o", markersize=3.5, label=label)
        best = sorted(sweep.argmin_set)
        ax.plot(best, [sweep.min_age] * len(best), linestyle="none", marker="*",
                markersize=11, color=line.get_color())
    ax.set_xscale("log")
    ax.set_xlabel("cluster size k")
    ax.set_ylabel("average version age of a node")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_scaling_figure(fit: ScalingFit, path: str | Path, label: str = "") -> Path:
    """Samples and fitted trend, on axes matching the fitted model."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ns = [s[0] for s in fit.samples]
    ages = [s[1] for s in fit.samples]
    ax.plot(ns, ages, linestyle="none", marker="o", label=label or "samples")
    lo, hi = math.log(min(ns)), math.log(max(ns))
    xs = [math.exp(lo + (hi - lo) * i / 64) for i in range(65)]
    if fit.model == "power":
        # fitted line in log-log space
        anchor = math.log(ages[0]) - fit.exponent * math.log(ns[0])
        ax.plot(xs, [math.exp(anchor + fit.exponent * math.log(x)) for x in xs],
                linestyle="--", label=f"slope {fit.exponent:.3f}")
        ax.set_yscale("log")
    else:
        anchor = ages[0] - fit.exponent * math.log(ns[0])
        ax.plot(xs, [anchor + fit.exponent * math.log(x) for x in xs],
                linestyle="--", label=f"slope {fit.exponent:.3f} per log n")
    ax.set_xscale("log")
    ax.set_xlabel("network size n")
    ax.set_ylabel("average version age of a node")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def topology_label(value: str) -> str:
    return _TOPOLOGY_LABEL.get(value, value)
