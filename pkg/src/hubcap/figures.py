"""Matplotlib renderers for the report path.

Figures are written next to the delimited report files: a two-panel
stacked-bar breakdown of costs per scenario (by cluster and by category),
an objective comparison, and per-scenario scarcity-price series where a
hard-served balance produced one.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import ScenarioReport
from .model import CATEGORIES

_CLUSTER_COLORS = plt.get_cmap("tab10")
_CATEGORY_COLORS = {
    "Flexibility": "#9467bd",
    "CO2 Infra": "#7f7f7f",
    "Power": "#1f77b4",
    "Conversion": "#2ca02c",
    "Transport": "#ff7f0e",
}


def render_cost_breakdown(reports: list[ScenarioReport], path) -> None:
    """Two stacked-bar panels: costs per scenario by cluster and by category."""
    solved = [r for r in reports if r.cost_by_cluster]
    if not solved:
        return
    names = [r.name for r in solved]
    clusters = sorted({cl for r in solved for cl in r.cost_by_cluster})
    xs = np.arange(len(solved))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5), constrained_layout=True)
    bottom = np.zeros(len(solved))
    for k, cl in enumerate(clusters):
        vals = np.array([r.cost_by_cluster.get(cl, 0.0) for r in solved])
        ax1.bar(xs, vals, bottom=bottom, label=cl, color=_CLUSTER_COLORS(k % 10))
        bottom += vals
    ax1.set_title("Cost by cluster")
    ax1.set_ylabel("M€")
    ax1.set_xticks(xs, names, rotation=20, ha="right")
    ax1.legend(fontsize=8)

    bottom = np.zeros(len(solved))
    for cat in CATEGORIES:
        vals = np.array([r.cost_by_category.get(cat, 0.0) for r in solved])
        if not vals.any():
            continue
        ax2.bar(xs, vals, bottom=bottom, label=cat, color=_CATEGORY_COLORS.get(cat))
        bottom += vals
    ax2.set_title("Cost by category")
    ax2.set_xticks(xs, names, rotation=20, ha="right")
    ax2.legend(fontsize=8)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_objectives(reports: list[ScenarioReport], path) -> None:
    solved = [r for r in reports if np.isfinite(r.objective)]
    if not solved:
        return
    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    xs = np.arange(len(solved))
    ax.bar(xs, [r.objective for r in solved], color="#1f77b4")
    ax.set_xticks(xs, [r.name for r in solved], rotation=20, ha="right")
    ax.set_ylabel("objective (M€)")
    ax.set_title("Total cost per scenario")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_scarcity_prices(report: ScenarioReport, path) -> None:
    if not report.ens_shadow_prices:
        return
    fig, ax = plt.subplots(figsize=(8, 4), constrained_layout=True)
    for eid, series in sorted(report.ens_shadow_prices.items()):
        ax.plot(series, label=eid, lw=1.2)
        t, peak = report.ens_peak[eid]
        ax.plot([t], [peak], "rv", ms=6)
    ax.set_xlabel("step")
    ax.set_ylabel("scarcity price (€/MWh)")
    ax.set_title(f"{report.name}: marginal cost of served demand")
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=150)
    plt.close(fig)
