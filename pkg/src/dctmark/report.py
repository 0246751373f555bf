"""Figure rendering for benchmark output.

Kept out of the harness so experiment runs never import a plotting backend;
the CLI calls in here when asked for figures.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .attacks import KIND_NONE
from .harness import RocCurve, ValidationReport


def _curve_label(curve: RocCurve) -> str:
    cfg = curve.config
    label = cfg.scheme
    if cfg.attack.kind != KIND_NONE:
        label += f", {cfg.attack.label()}"
    return label


def save_roc_figure(curves, path, title: str | None = None) -> None:
    """Render ROC curves, false-alarm probability on a log axis vs miss rate."""
    if isinstance(curves, RocCurve):
        curves = [curves]
    curves = list(curves)
    if not curves:
        raise ValueError("no curves to plot")
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for curve in curves:
        ax.semilogx(curve.p_fa, curve.p_m, marker="o", markersize=3.5, label=_curve_label(curve))
    ax.set_xlabel("probability of false alarm")
    ax.set_ylabel("probability of miss")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    if title is None:
        cfg = curves[0].config
        host = cfg.image if cfg.image is not None else "synthetic host"
        title = f"{host}  a={cfg.a:g}  N={cfg.n}  {cfg.mask_mode}  {curves[0].trials} trials"
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_validation_figure(report: ValidationReport, path) -> None:
    """Closed-form miss probability against the simulated rate, 3 SE error bars."""
    p_fa = [row.p_fa for row in report.rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.semilogx(p_fa, [row.formula for row in report.rows], "-", label="closed form")
    ax.errorbar(
        p_fa,
        [row.empirical for row in report.rows],
        yerr=[3.0 * row.std_error for row in report.rows],
        fmt="o",
        markersize=4,
        capsize=3,
        label="simulated",
    )
    ax.set_xlabel("probability of false alarm")
    ax.set_ylabel("probability of miss")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    ax.set_title(
        f"N={report.n}  k={report.k:g}  sigma={report.sigma:g}  {report.trials} trials",
        fontsize=9,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
