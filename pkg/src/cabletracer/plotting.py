"""Figure rendering for sweep reports."""

from __future__ import annotations

from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .sweep import DEFAULT_DEAD_FRACTION, FaultReport, SweepRecord


def render_sweep_figure(
    records: list[SweepRecord],
    line_frequency_hz: float,
    path: str,
    *,
    report: Optional[FaultReport] = None,
    dead_fraction: float = DEFAULT_DEAD_FRACTION,
) -> str:
    """Write the frequency-vs-distance chart of a sweep to an image file."""
    if not records:
        raise ValueError("cannot plot an empty sweep")
    distances = [r.distance_m for r in records]
    freqs = [r.frequency_hz for r in records]

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(distances, freqs, color="tab:blue", marker="o", label="measured frequency")
    dead = [(r.distance_m, r.frequency_hz) for r in records if r.fault]
    if dead:
        ax.scatter(
            [d for d, _ in dead],
            [f for _, f in dead],
            color="tab:red",
            zorder=3,
            label="fault samples",
        )
    ax.axhline(line_frequency_hz, color="tab:green", linestyle="--", linewidth=1,
               label=f"line frequency {line_frequency_hz:g} Hz")
    ax.axhline(dead_fraction * line_frequency_hz, color="tab:red", linestyle=":",
               linewidth=1, label="dead cutoff")
    if report is not None and report.found:
        ax.axvspan(report.interval_low_m, report.interval_high_m,
                   color="tab:red", alpha=0.12, label="fault interval")
    ax.set_xlabel("distance along route (m)")
    ax.set_ylabel("measured frequency (Hz)")
    ax.set_title("Tracer sweep")
    ax.set_ylim(bottom=-2)
    ax.legend(loc="center left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
