"""Static SVG panels of error budgets and pulse trains."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["budget_axes", "pulse_axes", "save_svg", "budget_panel", "pulse_train_panel"]

# Fixed hash salt keeps SVG element ids stable between runs.
plt.rcParams["svg.hashsalt"] = "iongate"

_COMPONENTS = (
    ("eps_deph", "dephasing", ":"),
    ("eps_mot", "motional", "-."),
    ("eps_carr", "carrier", "--"),
)


def save_svg(fig, path):
    """Write ``fig`` as SVG without a timestamp."""
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def budget_axes(ax, points, optimum=None, label=None, color="C0", components=True, reference=None):
    """Plot total and per-source infidelity against gate time on ``ax``.

    ``points`` are :class:`SweepPoint` objects; the eps axis is logarithmic.
    """
    t = np.array([p.gate_time for p in points]) * 1e6
    total = np.array([p.budget.eps_total for p in points])
    ax.plot(t, total, "-", color=color, label=label or "total")
    if components:
        for name, text, style in _COMPONENTS:
            ax.plot(t, [getattr(p.budget, name) for p in points], style, color="0.4", lw=0.8, label=text)
    if reference is not None:
        ax.axhline(reference.budget.eps_total, color="C3", lw=0.8, ls="--", label="single pulse")
    if optimum is not None:
        ax.plot([optimum.gate_time * 1e6], [optimum.budget.eps_total], "*", color="gold", ms=12, mec="k")
    ax.set_yscale("log")
    ax.set_xlabel("gate time (us)")
    ax.set_ylabel("infidelity")
    return ax


def pulse_axes(ax, point, title=None):
    """Bar plot of the pulse Rabi frequencies of a pulse-train point."""
    amps = np.asarray(point.amplitudes) / (2.0 * np.pi * 1e3)
    n = amps.size
    width = point.gate_time * 1e6 / n
    starts = np.arange(n) * width
    ax.bar(starts, amps, width=width, align="edge", edgecolor="k", color="C1")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("time (us)")
    ax.set_ylabel("Rabi/2pi (kHz)")
    if title:
        ax.set_title(title)
    return ax


def budget_panel(path, curves, title=""):
    """One budget panel with several curves.

    Parameters
    ----------
    path : str
    curves : list of (label, SweepResult)
    """
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for k, (label, result) in enumerate(curves):
        budget_axes(ax, result.points, result.optimum, label=label, color=f"C{k}", components=(k == len(curves) - 1))
    ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    save_svg(fig, path)


def pulse_train_panel(path, result, title=""):
    """Reference pulses, budget curve and optimum pulses of a pulse-train sweep."""
    fig, axes = plt.subplots(3, 1, figsize=(6, 8), gridspec_kw={"height_ratios": [1, 2, 1]})
    if result.reference is not None:
        reference = result.reference
        axes[0].bar([0.0], [reference.rabi / (2.0 * np.pi * 1e3)], width=reference.gate_time * 1e6, align="edge", color="C0")
        axes[0].set_ylabel("Rabi/2pi (kHz)")
        axes[0].set_title(title)
    budget_axes(axes[1], result.points, result.optimum, reference=result.reference)
    axes[1].legend(fontsize=7)
    pulse_axes(axes[2], result.optimum)
    fig.tight_layout()
    save_svg(fig, path)
