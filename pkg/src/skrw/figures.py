"""Optional sweep plots. Data stays exact until the plotting call.

PNG bytes are not part of the determinism contract (they depend on the
matplotlib build); the JSON and CSV reports are the canonical output.
"""

from __future__ import annotations

import os
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _f(v: str) -> float:
    return float(Fraction(v))


def write_figures(samples: list, outdir: str) -> list:
    """Render sweep summary plots; returns the written paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = []

    j12 = [_f(row["j12"]) for row in samples]
    j23 = [_f(row["j23"]) for row in samples]
    hold = [row["claims_hold"] for row in samples]

    fig, ax = plt.subplots(figsize=(5, 4))
    for flag, color, label in ((True, "tab:blue", "claims hold"),
                               (False, "tab:red", "claims violated")):
        xs = [x for x, h in zip(j12, hold) if h is flag]
        ys = [y for y, h in zip(j23, hold) if h is flag]
        if xs:
            ax.scatter(xs, ys, s=14, c=color, label=label)
    ax.set_xlabel("J12")
    ax.set_ylabel("J23")
    ax.set_title("Sampled structure constants")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = os.path.join(outdir, "j_scatter.png")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    paths.append(path)

    dims = [row["t_kernel_dimension"] for row in samples]
    fig, ax = plt.subplots(figsize=(4, 3))
    levels = sorted(set(dims))
    ax.bar([str(d) for d in levels], [dims.count(d) for d in levels],
           color="tab:gray")
    ax.set_xlabel("T-system kernel dimension")
    ax.set_ylabel("samples")
    ax.set_title("Kernel dimension across the sweep")
    fig.tight_layout()
    path = os.path.join(outdir, "kernel_dimensions.png")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(4, 3))
    ax.hist([_f(row["j12"]) + _f(row["j23"]) + _f(row["j31"])
             for row in samples], bins=24, color="tab:green")
    ax.set_xlabel("J12 + J23 + J31")
    ax.set_ylabel("samples")
    ax.set_title("J-sum spread (identity fixes the product term)")
    fig.tight_layout()
    path = os.path.join(outdir, "j_sum_hist.png")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    paths.append(path)

    return paths
