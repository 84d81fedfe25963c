"""Figure rendering for the CLI report paths.

All figures are written to files (SVG) next to the CSV output; matplotlib
is imported lazily so commands that do not plot stay fast.
"""

from __future__ import annotations

from . import escape


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def trajectory_figure(records, path) -> None:
    """Five characteristics of one walk against the step index."""
    plt = _plt()
    names = ["dist", "size", "height", "outdegree", "strahler"]
    fig, axes = plt.subplots(3, 2, figsize=(10, 9), sharex=True)
    hs = [r.h for r in records]
    series = {
        "dist": [r.dist for r in records],
        "size": [r.size for r in records],
        "height": [r.height for r in records],
        "outdegree": [r.outdegree for r in records],
        "strahler": [r.strahler for r in records],
    }
    for ax, name in zip(axes.flat, names):
        if name == "dist" and series["dist"][0] is None:
            ax.set_visible(False)
            continue
        ax.plot(hs, series[name], lw=0.8, color="black")
        ax.set_ylabel(name)
        ax.set_xlabel("h")
    axes.flat[-1].set_visible(False)
    fig.suptitle("walk characteristics")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def curves_figure(curves: escape.MeanCurves, rho_offset: int, path) -> None:
    """Mean size and mean distance per initial size, with the theoretical
    size asymptote dashed."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(8, 5))
    hs = range(curves.steps + 1)
    for x in curves.sizes:
        ax.plot(hs, curves.curves[x]["size"], color="black", lw=0.8)
        ax.plot(hs, curves.curves[x]["dist"], color="tab:red", lw=0.8)
        pred = [escape.size_prediction(x, max(h, 1), rho_offset) for h in hs]
        ax.plot(hs, pred, color="tab:blue", ls="--", lw=0.8)
    ax.set_xlabel("h")
    ax.set_ylabel("mean size (black), mean distance (red), prediction (dashed)")
    ax.set_title(f"average size and end-to-end distance, {curves.replicates} replicates")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def ratio_figure(curves: escape.MeanCurves, path) -> None:
    """Distance over its three size proxies, per initial size."""
    import numpy as np

    plt = _plt()
    fig, ax = plt.subplots(figsize=(8, 5))
    hs = range(1, curves.steps + 1)
    for x in curves.sizes:
        dist = curves.curves[x]["dist"][1:]
        size = curves.curves[x]["size"][1:]
        lower = size - x
        ax.plot(hs, dist / size, color="tab:green", lw=0.7)
        ax.plot(hs, np.where(lower > 0, dist / np.where(lower > 0, lower, 1.0), np.nan), color="tab:blue", lw=0.7)
        ax.plot(hs, dist / (size + x), color="tab:red", lw=0.7)
    ax.axhline(1.0, color="black", lw=0.6)
    ax.set_xlabel("h")
    ax.set_ylabel("mean dist / proxy")
    ax.set_title("distance over size (green), size - x (blue), size + x (red)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def alpha_figure(model: escape.EscapeModel, path) -> None:
    """Fitted quadratic coefficients against time and their power-law fit."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 5))
    hs = sorted(model.alpha)
    ax.plot(hs, [model.alpha[h] for h in hs], "x", color="black", label="alpha_h")
    ax.plot(
        hs,
        [model.beta * h**-model.exponent for h in hs],
        "--",
        color="tab:blue",
        label=f"beta / h^(5/4), beta = {model.beta:.4f}",
    )
    ax.set_xlabel("h")
    ax.set_ylabel("alpha")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def sharp_rate_figure(curves: escape.MeanCurves, model: escape.EscapeModel, path) -> None:
    """Mean distance curves against the fitted sharp escape rate."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(8, 5))
    hs = range(1, curves.steps + 1)
    for x in curves.sizes:
        ax.plot(hs, curves.curves[x]["dist"][1:], color="tab:red", lw=0.8)
        ax.plot(hs, [escape.sharp_rate(x, h, model.beta) for h in hs], color="tab:blue", ls="--", lw=0.8)
    ax.set_xlabel("h")
    ax.set_ylabel("mean distance (red), sharp rate (dashed)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def bench_figure(rows, path) -> None:
    """Mean computation times per size on a log scale, plus the ratio."""
    plt = _plt()
    agg = [r for r in rows if r.op == "all"]
    sizes = [r.size for r in agg]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.5))
    ax1.plot(sizes, [r.t_full for r in agg], "o-", label="from scratch")
    ax1.plot(sizes, [r.t_incremental for r in agg], "s-", label="incremental")
    ax1.set_yscale("log")
    ax1.set_xlabel("tree size")
    ax1.set_ylabel("mean seconds per update")
    ax1.legend()
    ax2.plot(sizes, [r.ratio for r in agg], "o-", color="black")
    ax2.set_xlabel("tree size")
    ax2.set_ylabel("speedup ratio")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
