"""Figures written next to the CLI's JSON/CSV reports."""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def figsize(scale=1.0):
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    width = 6.0 * scale
    return width, width * golden


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # no software/date stamps so reruns give identical files
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_tunnel(tr, path, *, labels=("P(X1)", "P(X2)"), balance=None, blocked=()):
    """Occupation probabilities against time, blocked intervals shaded."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize())
        for lo, hi in blocked:
            ax.axvspan(lo, min(hi, tr.t[-1]) if len(tr.t) else hi, color="0.9", lw=0)
        ax.plot(tr.t, tr.p1, label=labels[0])
        ax.plot(tr.t, tr.p2, label=labels[1])
        ax.axhline(0.5, color="0.5", lw=0.6, ls=":")
        if balance is not None:
            ax.axvline(balance, color="C3", lw=0.8, ls="--", label="balance")
        ax.set_xlabel("t")
        ax.set_ylabel("probability")
        ax.set_ylim(-0.02, 1.02)
        ax.legend(loc="best", frameon=False)
        return _save(fig, path)


def plot_errors(p0, p1, n, type1, type2, path, *, threshold=None):
    ks = np.arange(n + 1)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize())
        ax.step(ks, type1, where="mid", label="type I")
        ax.step(ks, type2, where="mid", label="type II")
        if threshold is not None:
            ax.axvline(threshold, color="0.5", lw=0.8, ls="--")
        ax.set_yscale("symlog", linthresh=1e-6)
        ax.set_xlabel("threshold k")
        ax.set_ylabel("error probability")
        ax.set_title(f"p0 = {p0:g}, p1 = {p1:g}, n = {n}")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_readings(records, path):
    """Gram deviation and single-input norm per sign reading."""
    names = [r["reading"] for r in records]
    dev = [r["gram"]["max_deviation"] for r in records]
    norm = [r["single_input_check"]["image_norm"] for r in records]
    x = np.arange(len(names))
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize(0.8))
        ax.bar(x - 0.2, dev, width=0.4, label="max |G - I|")
        ax.bar(x + 0.2, norm, width=0.4, label="norm of image of (Psi1+Psi2)/sqrt2")
        ax.set_xticks(x)
        ax.set_xticklabels(names)
        ax.set_xlabel("sign reading")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_row_sums(alpha_abs2, path):
    """Forced row sums 2|alpha|^2 and 2|beta|^2 with the requested target marked."""
    xs = np.linspace(0, 1, 201)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=figsize(0.8))
        ax.plot(xs, 2 * xs, label="|a|^2 = 2|alpha|^2")
        ax.plot(xs, 2 * (1 - xs), label="|d|^2 = 2|beta|^2")
        ax.axhline(1, color="0.5", lw=0.8, ls=":")
        ax.plot([alpha_abs2, alpha_abs2], [2 * alpha_abs2, 2 * (1 - alpha_abs2)], "ko", ms=4)
        ax.set_xlabel("|alpha|^2")
        ax.set_ylabel("row sum")
        ax.legend(frameon=False)
        return _save(fig, path)
