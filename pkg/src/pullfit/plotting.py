"""Figures written next to the delimited outputs.

Everything goes through the object-oriented matplotlib API on the Agg/SVG
backends, so plotting is safe off the main thread and never opens a window.
SVG output is byte-stable: fixed hash salt and no date metadata.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .design import SeriesKind
from .estimation import DatasetContext, FitResult, derive_seed
from .kde import build_kde, silverman_bandwidth
from .synthesis import resample_target_percepts, synthesize_compound

_RC = {
    "svg.hashsalt": "pullfit",
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
}
_METADATA = {"Date": None, "Creator": "pullfit"}

MIXTURE_COLOR = "#6a3d9a"
IDEAL_COLOR = "#7f7f7f"
DATA_COLOR = "#a6cee3"


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format=path.suffix.lstrip(".") or "svg", metadata=_METADATA,
                    bbox_inches="tight")
    return path


def _figure(width=6.0, height=4.0, ncols=1):
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(width, height))
        axes = fig.subplots(1, ncols, squeeze=False)[0]
    return fig, axes


def plot_delta_aic(result: FitResult, path) -> Path:
    """Histogram of per-repeat AIC differences (mixture minus ideal observer)."""
    deltas = np.array([r.delta_aic for r in result.per_repeat])
    fig, (ax,) = _figure()
    bins = min(30, max(5, deltas.size // 2))
    ax.hist(deltas, bins=bins, color=MIXTURE_COLOR, alpha=0.8, edgecolor="white")
    ax.axvline(0.0, color="black", lw=1)
    lo, hi = result.hdi_delta_aic
    ax.axvspan(lo, hi, color=MIXTURE_COLOR, alpha=0.12, lw=0,
               label=f"{result.hdi_mass:.0%} HDI")
    ax.axvline(result.mean_delta_aic, color=MIXTURE_COLOR, ls="--", lw=1.2,
               label=f"mean = {result.mean_delta_aic:.1f}")
    ax.set_xlabel("ΔAIC (mixture − ideal observer)")
    ax.set_ylabel("repeats")
    ax.set_title(f"{result.n_positive_delta} of {len(result.per_repeat)} repeats favour "
                 f"the ideal observer")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_model_fit(trials: Sequence, result: FitResult, path) -> Path:
    """Observed compound estimates against the fitted mixture and the ideal observer."""
    cfg = result.config
    weights = {SeriesKind.LINE: result.mean_w_line, SeriesKind.BAR: result.mean_w_bar}
    kinds = [k for k in (SeriesKind.LINE, SeriesKind.BAR) if weights[k] is not None]
    fig, axes = _figure(width=5.0 * len(kinds), height=3.8, ncols=len(kinds))
    for stream, (ax, kind) in enumerate(zip(axes, kinds)):
        ctx = DatasetContext.from_trials(trials, kind)
        seed = derive_seed(cfg.base_seed, 10_000 + stream)
        mix = synthesize_compound(ctx.target_dist, ctx.nontarget_dist, ctx.pairs,
                                  weights[kind], cfg.M, np.random.default_rng(seed)).values
        ideal = resample_target_percepts(ctx.target_dist, ctx.pairs, cfg.M,
                                         np.random.default_rng(seed))
        ax.hist(ctx.observations, bins=40, density=True, color=DATA_COLOR,
                edgecolor="white", label=f"observed (n={ctx.observations.size})")
        for samples, color, ls, label in (
                (mix, MIXTURE_COLOR, "-", f"mixture, w = {weights[kind]:.3f}"),
                (ideal, IDEAL_COLOR, "--", "ideal observer, w = 1")):
            kde = build_kde(samples, silverman_bandwidth(samples), cfg.grid_size)
            ax.plot(kde.grid_x, kde.grid_density, color=color, ls=ls, lw=1.5, label=label)
        ax.set_xlabel(f"{kind.value}-target estimate (px)")
        ax.set_ylabel("density")
        ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)


def plot_recovery(rows: Sequence[dict], path) -> Path:
    """Fitted mean weights against the generating weight."""
    true_w = np.array([r["true_w"] for r in rows])
    fig, (ax,) = _figure(width=4.5, height=4.5)
    ax.plot([true_w.min(), true_w.max()], [true_w.min(), true_w.max()],
            color="black", lw=0.8, label="identity")
    for key, color, label in (("line", MIXTURE_COLOR, "line target"),
                              ("bar", "#33a02c", "bar target")):
        mean = np.array([r[f"mean_w_{key}_hat"] for r in rows])
        lo = np.array([r[f"hdi_w_{key}_lo"] for r in rows])
        hi = np.array([r[f"hdi_w_{key}_hi"] for r in rows])
        ax.errorbar(true_w, mean, yerr=[mean - lo, hi - mean], fmt="o", ms=4,
                    color=color, capsize=2, label=label)
    ax.set_xlabel("generating weight")
    ax.set_ylabel("fitted weight (mean, HDI)")
    ax.legend(frameon=False)
    return _save(fig, path)
