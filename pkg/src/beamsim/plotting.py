"""Render sweep reports to figure files next to the CSV/JSON outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import SweepReport

_LABELS = {
    "algorithm1": "Beamspace MU (estimated)",
    "ground_truth_beamspace": "Beamspace MU (ground truth)",
    "beam_prediction": "Beam prediction baseline",
    "full_csi": "Full CSI (digital)",
}

_COLORS = {
    "algorithm1": "tab:blue",
    "ground_truth_beamspace": "tab:green",
    "beam_prediction": "tab:orange",
    "full_csi": "tab:red",
}


def render_sweep_figure(report: SweepReport, path: str | Path) -> None:
    """Median sum-SE vs EIRP per strategy, with the 25-75 percentile band.

    Written without software metadata so reruns produce byte-identical files.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    strategies = []
    for row in report.rows:
        if row.strategy not in strategies:
            strategies.append(row.strategy)
    for strategy in strategies:
        rows = sorted((r for r in report.rows if r.strategy == strategy),
                      key=lambda r: r.eirp_dbm)
        eirp = [r.eirp_dbm for r in rows]
        color = _COLORS.get(strategy)
        ax.plot(eirp, [r.median for r in rows], marker="o", color=color,
                label=_LABELS.get(strategy, strategy))
        ax.fill_between(eirp, [r.p25 for r in rows], [r.p75 for r in rows],
                        color=color, alpha=0.2, linewidth=0)
    ax.set_xlabel("EIRP (dBm)")
    ax.set_ylabel("Sum spectral efficiency (bps/Hz)")
    ax.set_title(f"Median sum-SE over {report.trials} trials (band: 25-75%)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)
