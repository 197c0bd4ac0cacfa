"""Figure rendering for the report paths.

Everything draws to files through the Agg backend; nothing here opens a
window. Imported lazily by the emission code so that library users never
pay for matplotlib unless a figure is actually requested.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_roc_figure",
    "save_benchmark_figure",
    "save_rates_figure",
]


def save_roc_figure(curve, hull, path, marked_slopes=None, title=None) -> None:
    """Plot an averaged ROC curve with its convex hull.

    ``marked_slopes``, when given, is a mapping of label to slope; the
    hull vertex optimal for each slope gets a marker and annotation.
    """
    from .roc import locate_operating_point

    fig, ax = plt.subplots(figsize=(6.0, 5.6))
    ax.plot([0, 1], [0, 1], color="0.8", linestyle=":", linewidth=1)
    ax.plot(
        curve.fpr, curve.tpr, color="tab:blue", linewidth=1.2, label="mean curve"
    )
    ax.plot(
        hull.fpr,
        hull.tpr,
        color="tab:red",
        linewidth=1.2,
        marker=".",
        markersize=5,
        label="convex hull",
    )
    if marked_slopes:
        for label, slope in marked_slopes.items():
            if not math.isfinite(slope):
                continue
            i = locate_operating_point(hull, slope)
            x, y = hull.points[i]
            ax.plot([x], [y], marker="o", markersize=8, fillstyle="none",
                    color="black")
            ax.annotate(
                f"{label} (K={slope:.3f})",
                (x, y),
                textcoords="offset points",
                xytext=(8, -10),
                fontsize=8,
            )
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_benchmark_figure(stats_by_method, m: int, path, title=None) -> None:
    """Two-panel comparison across methods: percent rates and NI.

    ``stats_by_method`` maps method name to the dict produced by
    `RunResult.metric_stats` (values are (mean, std) on the 0..1 scale).
    """
    methods = list(stats_by_method)
    fig, (ax_rates, ax_ni) = plt.subplots(
        1, 2, figsize=(2.2 + 1.1 * len(methods), 4.6), width_ratios=[3, 2]
    )

    rate_keys = [("e", "error"), ("rej", "reject"), ("g", "recognition G-mean")]
    width = 0.8 / len(rate_keys)
    xs = np.arange(len(methods))
    for j, (key, label) in enumerate(rate_keys):
        means = [100 * stats_by_method[m_][key][0] for m_ in methods]
        stds = [100 * stats_by_method[m_][key][1] for m_ in methods]
        ax_rates.bar(
            xs + (j - 1) * width, means, width, yerr=stds, capsize=2, label=label
        )
    ax_rates.set_xticks(xs)
    ax_rates.set_xticklabels(methods, rotation=45, ha="right", fontsize=8)
    ax_rates.set_ylabel("percent")
    ax_rates.legend(fontsize=8)

    ni_means = [stats_by_method[m_]["ni"][0] for m_ in methods]
    ni_stds = [stats_by_method[m_]["ni"][1] for m_ in methods]
    ax_ni.bar(xs, ni_means, 0.6, yerr=ni_stds, capsize=2, color="tab:purple")
    ax_ni.set_xticks(xs)
    ax_ni.set_xticklabels(methods, rotation=45, ha="right", fontsize=8)
    ax_ni.set_ylabel("normalized mutual information")

    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_rates_figure(stats, m: int, path, title=None) -> None:
    """Per-class recognition/error/reject breakdown for a single run.

    ``stats`` is the dict from `RunResult.metric_stats`; bars show the
    per-class error and reject rates plus the overall error, reject, and
    NI values so a single method's behavior is visible at a glance.
    """
    tags = ["n", "p"] if m == 2 else [str(i) for i in range(1, m + 1)]
    labels = [f"E_{t}" for t in tags] + ["E"]
    keys = [f"e_{t}" for t in tags] + ["e"]
    labels += [f"Rej_{t}" for t in tags] + ["Rej"]
    keys += [f"rej_{t}" for t in tags] + ["rej"]
    labels.append("G")
    keys.append("g")

    means = [100 * stats[k][0] for k in keys]
    stds = [100 * stats[k][1] for k in keys]
    fig, ax = plt.subplots(figsize=(1.4 + 0.62 * len(keys), 4.2))
    xs = np.arange(len(keys))
    ax.bar(xs, means, 0.62, yerr=stds, capsize=2, color="tab:blue")
    ax.set_xticks(xs)
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("percent")
    ni_mean, ni_std = stats["ni"]
    note = f"NI = {ni_mean:.4f} ({ni_std:.4f})"
    ax.text(
        0.98,
        0.95,
        note,
        transform=ax.transAxes,
        ha="right",
        va="top",
        fontsize=9,
    )
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
