"""Render run figures to files: phase sawtooth, neighbor gaps, index decay.

Figures are drawn from trace records plus the initial snapshot, so a
report can be rendered for any run the trace captures. Phases ramp
linearly between events; each oscillator's series therefore carries both
the pre-event ramp endpoint and the post-event value at every firing
instant, which reproduces the sawtooth exactly.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import compute_deltas, firing_order
from .phase import TWO_PI
from .runner import RunResult


def _phase_series(result: RunResult):
    """Per-oscillator (t, phase) polylines including ramp endpoints."""
    n = result.config.n
    omega = result.config.omega
    times = [[0.0] for _ in range(n)]
    values = [[result.initial_phases[i]] for i in range(n)]
    prev_t = 0.0
    prev_phases = list(result.initial_phases)
    for record in result.records:
        dt = record.time - prev_t
        for i in range(n):
            ramp_end = prev_phases[i] + omega * dt
            times[i].append(record.time)
            values[i].append(min(ramp_end, TWO_PI))
            times[i].append(record.time)
            values[i].append(record.phases_after[i])
        prev_t = record.time
        prev_phases = list(record.phases_after)
    return times, values


def plot_phases(result: RunResult, path) -> None:
    times, values = _phase_series(result)
    fig, ax = plt.subplots(figsize=(8, 4))
    for i in range(result.config.n):
        ax.plot(times[i], values[i], linewidth=0.9, label=f"osc {i}")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("phase [rad]")
    ax.set_ylim(0.0, TWO_PI)
    ax.set_title(f"oscillator phases (n={result.config.n}, l={result.config.l:g})")
    if result.config.n <= 10:
        ax.legend(loc="upper right", fontsize="small", ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_deltas(result: RunResult, path) -> None:
    slot = TWO_PI / result.config.n
    order = firing_order(result.initial_phases)
    initial = compute_deltas([result.initial_phases[i] for i in order])
    times = [0.0] + [r.time for r in result.records]
    fig, ax = plt.subplots(figsize=(8, 4))
    for k in range(result.config.n):
        series = [initial[k]] + [r.deltas_after[k] for r in result.records]
        ax.step(times, series, where="post", linewidth=0.9, label=f"gap {k}")
    ax.axhline(slot, color="black", linestyle="--", linewidth=0.8, label="2*pi/n")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("neighbor gap [rad]")
    ax.set_title(f"neighbor gaps (n={result.config.n}, l={result.config.l:g})")
    if result.config.n <= 10:
        ax.legend(loc="upper right", fontsize="small", ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_index(result: RunResult, path) -> None:
    times = [0.0] + [r.time for r in result.records]
    series = [result.initial_p] + [r.p_after for r in result.records]
    fig, ax = plt.subplots(figsize=(8, 3.2))
    ax.step(times, series, where="post", color="tab:blue")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("desynchronization index [rad]")
    ax.set_ylim(bottom=0.0)
    ax.set_title(f"index decay (n={result.config.n}, l={result.config.l:g})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figures(result: RunResult, out_dir) -> list[Path]:
    """Write the three standard figures into out_dir; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "phases.png", out / "deltas.png", out / "index.png"]
    plot_phases(result, paths[0])
    plot_deltas(result, paths[1])
    plot_index(result, paths[2])
    return paths
