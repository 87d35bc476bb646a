"""Deterministic SVG log-log plots of sweep results."""

from __future__ import annotations

import os

import numpy as np

from .errors import DegenerateData

__all__ = ["plot_loglog"]

WIDTH, HEIGHT = 800, 600


def plot_loglog(x, y, fit, path, *, xlabel: str = "x", ylabel: str = "y", title: str | None = None) -> str:
    """Scatter ``(x, y)`` on log-log axes with the fitted power law.

    Parameters
    ----------
    x, y : array_like
        At least four positive samples.
    fit : HolderFit
        Line to draw; its slope is printed with three decimals.
    path : str or path-like
        Output ``.svg`` file (800 x 600 pt canvas).

    Returns
    -------
    str
        The written path.

    Raises
    ------
    DegenerateData
        With fewer than four or non-positive samples.
    OSError
        If the file cannot be written.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if len(x) < 4 or len(x) != len(y):
        raise DegenerateData("need at least four (x, y) samples")
    if np.any(~(x > 0)) or np.any(~(y > 0)):
        raise DegenerateData("log-log plots need positive samples")

    import matplotlib
    matplotlib.use("Agg")
    from matplotlib import pyplot as plt

    # fixed ids and text-as-text keep the output byte-stable and searchable
    rc = {"svg.hashsalt": "lotstab", "svg.fonttype": "none", "font.family": "DejaVu Sans"}
    with matplotlib.rc_context(rc):
        fig, ax = plt.subplots(figsize=(WIDTH / 72.0, HEIGHT / 72.0), dpi=72)
        ax.loglog(x, y, "o", color="#1f4e79", label="samples")
        xs = np.geomspace(x.min(), x.max(), 64)
        ax.loglog(xs, fit.predict(xs), "-", color="#b03a2e", label=f"fit, slope {fit.slope:.3f}")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.text(0.04, 0.94, f"slope = {fit.slope:.3f}", transform=ax.transAxes, va="top")
        ax.legend(loc="lower right")
        ax.grid(True, which="both", alpha=0.3)
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return str(path)
