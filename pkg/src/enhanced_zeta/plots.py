"""Figure rendering for CLI reports: written to files next to the
delimited output, never shown interactively."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_check_figure(report: dict, path: str) -> None:
    """Bar chart of relative error against tolerance for every record."""
    records = report.get("records", [])
    if not records:
        return
    ids = [r["id"] for r in records]
    rel = np.array([max(r["rel_error"], 1e-18) for r in records])
    tol = np.array([max(r["tol"], 1e-18) for r in records])
    passed = [r["passed"] for r in records]

    fig, ax = plt.subplots(figsize=(max(6.0, 0.45 * len(ids)), 4.0))
    xs = np.arange(len(ids))
    colors = ["#2a7e43" if p else "#b02a2a" for p in passed]
    ax.bar(xs, rel, color=colors)
    ax.plot(xs, tol, "k_", markersize=12, label="tolerance")
    ax.set_yscale("log")
    ax.set_xticks(xs)
    ax.set_xticklabels(ids, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("relative error")
    ax.set_title(f"{report.get('command', 'report')}: "
                 f"{report['summary']['n_passed']}/{report['summary']['n_records']} passed")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_gamma_figure(rows: list[dict], path: str) -> None:
    """Gamma factor and constant magnitudes along the tabulated grid."""
    if not rows:
        return
    xs = np.array([r["s1_re"] if rows[0]["axis"] == "s1" else r["s2_re"] for r in rows])
    gam = np.array([r["gamma_abs"] for r in rows])
    cc = np.array([r["c_abs"] for r in rows])
    poles = np.array([r["pole"] for r in rows], dtype=bool)

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ok = ~poles
    ax.plot(xs[ok], gam[ok], ".-", label="|gamma factor|", markersize=3)
    ax.plot(xs, cc, "--", label="|c(s)|")
    for xp in xs[poles]:
        ax.axvline(xp, color="#b02a2a", alpha=0.4, linewidth=0.8)
    ax.set_yscale("log")
    ax.set_xlabel(f"Re {rows[0]['axis']}")
    ax.set_ylabel("magnitude")
    ax.legend(fontsize=8)
    ax.set_title("gamma factor along the grid (vertical lines: poles)")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
