"""Matplotlib renderings of the evaluation reports, written next to the
CSV output. Import stays lazy so CLI runs without --plot never touch
matplotlib."""

from __future__ import annotations

from collections import defaultdict

import numpy as np


def _axes():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def save_pr_figure(curves, path) -> None:
    """Mean precision against mean recall across queries, per cutoff k."""
    plt = _axes()
    kmax = max(len(c.points) for c in curves)
    recalls, precisions = [], []
    for k in range(1, kmax + 1):
        pts = [c.points[k - 1] for c in curves if len(c.points) >= k]
        recalls.append(np.mean([p.recall for p in pts]))
        precisions.append(np.mean([p.precision for p in pts]))
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(recalls, precisions, marker="o", markersize=3, color="tab:blue")
    ax.set_xlabel("recall")
    ax.set_ylabel("precision")
    ax.set_title(f"precision vs recall ({len(curves)} queries)")
    ax.set_xlim(0, 1.02)
    ax.set_ylim(0, 1.02)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_bullseye_figure(report, labels_by_id, path) -> None:
    """Mean per-class hit counts with the overall score marked."""
    plt = _axes()
    per_class = defaultdict(list)
    for shape_id, hits in report.per_query_hits:
        per_class[labels_by_id[shape_id]].append(hits)
    names = sorted(per_class)
    means = [np.mean(per_class[name]) for name in names]
    fig, ax = plt.subplots(figsize=(max(6, 0.28 * len(names)), 4.5))
    ax.bar(range(len(names)), means, color="tab:blue")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=90, fontsize=7)
    ax.set_ylabel(f"mean same-class hits in top {report.cutoff}")
    ax.set_title(f"bull's-eye score {report.overall_score:.4f}")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_tune_figure(results, best, path) -> None:
    """Weight-simplex scatter colored by bull's-eye score."""
    plt = _axes()
    xs = [w.w_grid for w, _ in results]
    ys = [w.w_cdf for w, _ in results]
    scores = [s for _, s in results]
    fig, ax = plt.subplots(figsize=(6, 5))
    sc = ax.scatter(xs, ys, c=scores, cmap="viridis", s=36)
    ax.plot([best.w_grid], [best.w_cdf], marker="*", markersize=16,
            color="tab:red", linestyle="none", label="best")
    ax.set_xlabel("grid weight")
    ax.set_ylabel("signature weight")
    ax.set_title("bull's-eye score over the weight simplex")
    ax.legend(loc="upper right")
    fig.colorbar(sc, ax=ax, label="score")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
