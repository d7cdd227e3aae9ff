"""Figure rendering for the report paths of the CLI.

Every plotting command writes PNG files next to the delimited output it
illustrates; nothing here feeds back into the numerics. matplotlib runs on
the Agg backend so the CLI works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analytic import TransmissionPoint
from .evolve import TimeSeries


def plot_series(series: TimeSeries, path: str | Path) -> Path:
    """Branch weights and in-barrier probability against time."""
    path = Path(path)
    fig, (ax, ax2) = plt.subplots(2, 1, figsize=(7.0, 6.0), sharex=True)
    t = series.times
    ax.plot(t, series.w_reflected**2, label="$w_R^2$ (reflected)")
    ax.plot(t, series.w_transmitted**2, label="$w_T^2$ (tunneled)")
    ax.plot(t, series.norm, "k--", lw=0.8, label="norm")
    ax.set_ylabel("probability")
    ax.legend(loc="center right")
    ax2.semilogy(t, np.maximum(series.p_inside, 1e-18))
    ax2.set_xlabel("t")
    ax2.set_ylabel("$p_{inside}$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_transmission(points: list[TransmissionPoint], path: str | Path) -> Path:
    """Exact transmission and the evanescent estimate against energy."""
    path = Path(path)
    energies = [p.energy for p in points]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(energies, [p.p_exact for p in points], label="exact")
    approx = [(p.energy, p.p_approx) for p in points if p.p_approx is not None]
    if approx:
        ax.plot(*zip(*approx), "--", label=r"$e^{-2\kappa L}$")
    ax.set_xlabel("E")
    ax.set_ylabel("T(E)")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_sweep(
    params: list[float], p_tunnel: list[float | None], param_name: str, path: str | Path
) -> Path:
    """Tunneling probability against the swept parameter; failed runs are gaps."""
    path = Path(path)
    xs = [x for x, p in zip(params, p_tunnel) if p is not None]
    ys = [p for p in p_tunnel if p is not None]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(xs, ys, "o-")
    ax.set_xlabel(param_name)
    ax.set_ylabel("$P_T$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
