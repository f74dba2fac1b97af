"""Figure rendering for the CLI report paths.

Every function takes arrays already computed by the library, draws a single
matplotlib figure, and writes it to the given path.  The Agg backend is
forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path: str):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_dispersion(path: str, p_dx, e_plus_dt, e_minus_dt, title: str = ""):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(p_dx, e_plus_dt, lw=1.2, label="E+ dt")
    ax.plot(p_dx, e_minus_dt, lw=1.2, label="E- dt")
    ax.axhline(np.pi / 2, color="gray", ls=":", lw=0.8)
    ax.axhline(-np.pi / 2, color="gray", ls=":", lw=0.8)
    ax.set_xlabel("p dx")
    ax.set_ylabel("E dt")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    _finish(fig, path)


def plot_gap_scan(path: str, m_dts, max_e_dts, title: str = ""):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(m_dts, max_e_dts, "o-", lw=1.2)
    ax.axhline(np.pi / 2, color="red", ls="--", lw=0.8, label="pi/2")
    ax.set_xlabel("m c^2 dt")
    ax.set_ylabel("max |E| dt")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    _finish(fig, path)


def plot_evolution(path: str, probabilities, title: str = ""):
    """Heat map of per-site probability over time; rows are steps."""
    fig, ax = plt.subplots(figsize=(6, 4))
    img = ax.imshow(
        np.asarray(probabilities), aspect="auto", origin="lower", cmap="magma"
    )
    fig.colorbar(img, ax=ax, label="site probability")
    ax.set_xlabel("site")
    ax.set_ylabel("step")
    ax.set_title(title)
    _finish(fig, path)


def plot_band_slice(path: str, swept_p_dx, energies_dt, title: str = ""):
    fig, ax = plt.subplots(figsize=(6, 4))
    for band in range(energies_dt.shape[1]):
        ax.plot(swept_p_dx, energies_dt[:, band], lw=1.0)
    ax.set_xlabel("p dx (swept axis)")
    ax.set_ylabel("E dt")
    ax.set_title(title)
    _finish(fig, path)


def plot_bars(path: str, labels, values, ylabel: str, title: str = ""):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(values)), values)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=7)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    _finish(fig, path)
