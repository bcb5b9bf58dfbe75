"""Figure rendering for run reports (vector graphics, written next to the CSV)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_STYLE = {
    "figure.figsize": (6.4, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "font.size": 9,
    "legend.fontsize": 8,
}


def _save(fig, outdir, name):
    path = os.path.join(outdir, name)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def render_evolution_figures(outdir, times, records) -> list[str]:
    """Write overlap, sector-weight, and residual figures as SVG files."""
    t = np.asarray(times)
    s = np.array([r.s for r in records])
    sym_w = np.array([r.sector_sym for r in records])
    anti_w = np.array([r.sector_anti for r in records])
    cont = np.array([r.continuity_residual for r in records])
    norms = np.array([r.norm for r in records])
    bmass = np.array([r.boundary_mass for r in records])
    paths = []

    with plt.rc_context(_STYLE):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 5.2))
        ax1.plot(t, s.real, label="Re S")
        ax1.plot(t, s.imag, label="Im S", linestyle="--")
        ax1.set_ylabel("exchange overlap S(t)")
        ax1.legend(loc="best")
        drift = np.abs(s - s[0])
        ax2.semilogy(t, np.maximum(drift, 1e-18), color="firebrick")
        ax2.set_ylabel("|S(t) - S(0)|")
        ax2.set_xlabel("t")
        paths.append(_save(fig, outdir, "overlap_S.svg"))

        fig, ax = plt.subplots()
        ax.plot(t, sym_w, label="symmetric sector")
        ax.plot(t, anti_w, label="antisymmetric sector")
        ax.set_xlabel("t")
        ax.set_ylabel("sector weight")
        ax.set_ylim(-0.05, 1.05)
        ax.legend(loc="best")
        paths.append(_save(fig, outdir, "sector_weights.svg"))

        fig, ax = plt.subplots()
        ax.semilogy(t, np.maximum(cont, 1e-18), label="continuity residual")
        ax.semilogy(t, np.maximum(np.abs(norms - 1.0), 1e-18),
                    label="|norm - 1|")
        ax.semilogy(t, np.maximum(bmass, 1e-18), label="boundary mass")
        ax.set_xlabel("t")
        ax.set_ylabel("residual")
        ax.legend(loc="best")
        paths.append(_save(fig, outdir, "residuals.svg"))

    return paths


def render_decay_figure(outdir, norms) -> list[str]:
    """Norm decay of the alternating-projection collapse check."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.semilogy(np.arange(len(norms)),
                    np.maximum(np.asarray(norms), 1e-30), marker=".")
        ax.set_xlabel("projection round")
        ax.set_ylabel("norm")
        return [_save(fig, outdir, "projection_decay.svg")]
