"""Figure rendering for the command-line reports.

Everything draws through the Agg backend and writes PNG files next to the
delimited output.  Figures are documentation, not data: the CSV and JSON
reports carry the numbers, these carry the shape of the motion.
"""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_DPI = 150
_META = {"Software": "carnot"}


def _atomic_savefig(fig, path: Path) -> None:
    """Write the rendered figure, temp-file first so failures leave nothing."""
    path = Path(path)
    tmp = path.with_name(path.name + ".part")
    try:
        fig.savefig(tmp, dpi=_DPI, metadata=_META, bbox_inches="tight",
                    format="png")
        os.replace(tmp, path)
    finally:
        plt.close(fig)
        if tmp.exists():
            tmp.unlink()


_KIND_STYLE = {
    "periodic": dict(color="tab:blue", lw=0.9),
    "constant": dict(color="tab:red", marker="o", ms=3.5, lw=0),
    "abnormal": dict(color="0.6", marker="x", ms=4, lw=0),
    "unresolved": dict(color="0.6", lw=0.7, ls=":"),
}


def portrait_figure(curves, d0, path) -> None:
    """Phase portrait on a two-dimensional leaf.

    curves is a list of dicts with keys "ys" ((n, 2) leaf-plane samples or
    None), "y0" (the seed), and "kind".  d0 is a fixed-set estimate or None;
    its marked points and hull are drawn under the orbits.
    """
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    if d0 is not None and len(d0.points_y):
        if len(d0.hull_y) >= 3:
            ax.fill(d0.hull_y[:, 0], d0.hull_y[:, 1], color="gold", alpha=0.35,
                    zorder=1, label="fixed set")
        ax.plot(d0.points_y[:, 0], d0.points_y[:, 1], ".", color="darkgoldenrod",
                ms=2.0, zorder=2)
    seen = set()
    for curve in curves:
        kind = curve["kind"]
        style = _KIND_STYLE.get(kind, _KIND_STYLE["unresolved"])
        label = kind if kind not in seen else None
        seen.add(kind)
        ys = curve.get("ys")
        if ys is not None and len(ys) > 1:
            ax.plot(ys[:, 0], ys[:, 1], label=label, **style, zorder=3)
        else:
            y0 = curve["y0"]
            ax.plot([y0[0]], [y0[1]], label=label, **style, zorder=3)
    ax.set_aspect("equal")
    ax.set_xlabel("$y_1$")
    ax.set_ylabel("$y_2$")
    ax.legend(loc="upper right", fontsize=8)
    _atomic_savefig(fig, path)


def trajectory_figure(ts, ys, hs, us, path) -> None:
    """Single-trajectory picture: leaf-plane orbit when available, state and
    control components against time otherwise."""
    if ys is not None and ys.ndim == 2 and ys.shape[1] == 2:
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.0, 4.4))
        ax1.plot(ys[:, 0], ys[:, 1], color="tab:blue", lw=0.9)
        ax1.plot([ys[0, 0]], [ys[0, 1]], "o", color="tab:red", ms=4)
        ax1.set_aspect("equal")
        ax1.set_xlabel("$y_1$")
        ax1.set_ylabel("$y_2$")
        ax1.set_title("orbit in leaf coordinates")
    else:
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.0, 4.4))
        for i in range(hs.shape[1]):
            ax1.plot(ts, hs[:, i], lw=0.8, label=f"$h_{{{i + 1}}}$")
        ax1.set_xlabel("$t$")
        ax1.legend(fontsize=7, ncol=2)
        ax1.set_title("first-layer state")
    for i in range(us.shape[1]):
        ax2.plot(ts, us[:, i], lw=0.8, label=f"$u_{{{i + 1}}}$")
    ax2.set_xlabel("$t$")
    ax2.legend(fontsize=7, ncol=2)
    ax2.set_title("extremal control")
    _atomic_savefig(fig, path)


def spectrum_figure(frequencies, histogram, path) -> None:
    """Frequency stems, with the torus-occupancy heat map when a recurrence
    scan produced one."""
    has_hist = histogram is not None and histogram.size > 0
    if has_hist:
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.0, 4.4))
    else:
        fig, ax1 = plt.subplots(figsize=(5.4, 4.4))
    if len(frequencies):
        ax1.stem(np.arange(1, len(frequencies) + 1), frequencies)
    ax1.set_xlabel("block index")
    ax1.set_ylabel("frequency")
    ax1.set_title("positive spectrum")
    if has_hist:
        im = ax2.imshow(histogram.T, origin="lower", aspect="equal",
                        extent=(0, 2 * np.pi, 0, 2 * np.pi), cmap="viridis")
        fig.colorbar(im, ax=ax2, shrink=0.85)
        ax2.set_xlabel(r"$\theta_1$")
        ax2.set_ylabel(r"$\theta_2$")
        ax2.set_title("angle-pair occupancy")
    _atomic_savefig(fig, path)


def casimir_figure(a_vec, path) -> None:
    """Stem plot of the polynomial Casimir coefficients."""
    a = np.asarray([float(v) for v in a_vec])
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    ax.stem(np.arange(1, len(a) + 1), a)
    ax.set_xlabel("generator index")
    ax.set_ylabel("coefficient")
    ax.set_title("Casimir coefficients")
    _atomic_savefig(fig, path)
