"""Figures written next to the CSV/JSON outputs of a run.

Uses the object-oriented matplotlib API on the Agg canvas so nothing touches
a display or the global pyplot state.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

GOLDEN = (math.sqrt(5) - 1.0) / 2.0
WIDTH = 6.4

STYLE = {
    "axes.labelsize": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "lines.linewidth": 1.2,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
}

COLORS = {"I": "#08589e", "R": "#e34a33"}


def _figure(rows: int = 1, cols: int = 1, height: float | None = None) -> tuple[Figure, np.ndarray]:
    height = WIDTH * GOLDEN if height is None else height
    fig = Figure(figsize=(WIDTH, height), layout="constrained")
    FigureCanvasAgg(fig)
    axes = np.atleast_1d(fig.subplots(rows, cols))
    return fig, axes


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    return path


def plot_readings(result, path) -> Path:
    """Density and current of both readings on the scenario grid."""
    with matplotlib.rc_context(STYLE):
        fig, (ax_rho, ax_j) = _figure(2, 1, height=WIDTH * 0.8)
        x = result.grid.x
        for reading in (result.reading_I, result.reading_R):
            c = COLORS.get(reading.label)
            ax_rho.plot(x, reading.rho, color=c, label=f"$\\rho_{reading.label}$")
            ax_j.plot(x, reading.current, color=c, label=f"$J_{reading.label}$")
        d = result.config.device
        ax_rho.set_title(f"{result.config.name}: $\\sigma$={d.sigma:g}, $\\lambda$={d.lam:g}")
        ax_rho.set_ylabel("density [1/length]")
        ax_j.set_ylabel("current [1/time]")
        ax_j.set_xlabel("x [length]")
        p = result.params_I
        lo, hi = p.mean_x - 6 * math.sqrt(result.params_R.var_x), p.mean_x + 6 * math.sqrt(result.params_R.var_x)
        for ax in (ax_rho, ax_j):
            ax.set_xlim(max(lo, x[0]), min(hi, x[-1]))
            ax.legend()
        return _save(fig, path)


def plot_sweep(rows: list[dict], path) -> Path:
    """epsilon against sigma, one line per lambda; invalid rows are skipped."""
    with matplotlib.rc_context(STYLE):
        fig, (ax,) = _figure()
        lambdas = sorted({r["lambda"] for r in rows})
        cmap = matplotlib.colormaps["viridis"]
        for i, lam in enumerate(lambdas):
            pts = sorted((r["sigma"], r["epsilon"]) for r in rows
                         if r["lambda"] == lam and r["valid"] and r["epsilon"] is not None)
            if not pts:
                continue
            s, e = zip(*pts)
            ax.plot(s, e, marker="o", ms=3, color=cmap(i / max(len(lambdas) - 1, 1)), label=f"$\\lambda$={lam:g}")
        ax.set_xlabel("$\\sigma$ [length]")
        ax.set_ylabel("$\\varepsilon$")
        ax.legend(ncol=2)
        return _save(fig, path)


def plot_samples(samples, reading, path, bins: int = 200) -> Path:
    """Histogram of position draws over the density they were drawn from."""
    with matplotlib.rc_context(STYLE):
        fig, (ax,) = _figure()
        ax.hist(samples.draws, bins=bins, density=True, color="0.75", label=f"{samples.count} draws")
        ax.plot(reading.grid.x, reading.rho, color=COLORS.get(reading.label), label=f"$\\rho_{reading.label}$")
        lo, hi = np.min(samples.draws), np.max(samples.draws)
        ax.set_xlim(lo, hi)
        ax.set_xlabel("x [length]")
        ax.set_ylabel("density [1/length]")
        ax.legend()
        return _save(fig, path)
