"""Matplotlib figures for the report and plotting subcommands.

Figures go straight to files through the Agg backend; nothing is shown
interactively.
"""

from __future__ import annotations

from contextlib import contextmanager

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 11,
    "axes.titlesize": 11,
    "legend.fontsize": 9,
    "legend.frameon": False,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}

BAND_COLORS = {"mono": "0.3", "band1": "tab:red", "band2": "tab:green",
               "band3": "tab:blue"}


@contextmanager
def _figure(path, width=5.0, height=3.4):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(width, height))
        try:
            yield fig, ax
            fig.savefig(path)
        finally:
            plt.close(fig)


def _color(label, k):
    return BAND_COLORS.get(label, f"C{k}")


def plot_transmission(curves, path, responsivity=None, title=None):
    """Filter transmission curves; ``curves`` is a list of ``(label, SpectralCurve)``."""
    with _figure(path) as (fig, ax):
        for k, (label, curve) in enumerate(curves):
            ax.plot(curve.wavelengths, curve.values, color=_color(label, k), label=label)
        if responsivity is not None:
            ax.plot(responsivity.wavelengths, responsivity.values, "k--", lw=0.8,
                    label="detector")
        ax.set_xlabel("wavelength (µm)")
        ax.set_ylabel("transmission")
        ax.set_ylim(0, 1.05)
        if title:
            ax.set_title(title)
        ax.legend()


def plot_calibration(samples, calibs, path):
    """Counts against blackbody temperature, with fitted curves.

    ``samples`` maps band label to ``[(T_c, counts), ...]``; ``calibs`` maps the
    same labels to :class:`~lwirms.pipeline.CalibrationCurve`.
    """
    with _figure(path) as (fig, ax):
        for k, (label, pts) in enumerate(samples.items()):
            t, c = np.array(pts).T
            color = _color(label, k)
            ax.plot(t, c, "o", ms=4, color=color, label=label)
            cal = calibs.get(label)
            if cal is not None:
                tt = np.linspace(*cal.domain_c, 200)
                ax.plot(tt, cal.counts(tt), "-", lw=1, color=color)
        ax.set_xlabel("blackbody temperature (°C)")
        ax.set_ylabel("corrected counts")
        ax.legend()


def plot_pitch_sweep(sweeps, path):
    """Resonance centre against pitch for each dielectric in ``sweeps``."""
    with _figure(path) as (fig, ax):
        for name, pairs in sweeps.items():
            p, c = np.array(pairs).T
            ax.plot(p, c, "o-", ms=3, label=name)
        ax.axhspan(8, 14, color="0.9", zorder=0)
        ax.set_xlabel("pitch (µm)")
        ax.set_ylabel("resonance wavelength (µm)")
        ax.legend()


def plot_frame(data, path, title=None, cmap="inferno", label=None, vmin=None, vmax=None):
    data = np.asarray(data)
    h, w = data.shape
    with _figure(path, width=4.8, height=4.8 * h / w + 0.4) as (fig, ax):
        im = ax.imshow(data, cmap=cmap, vmin=vmin, vmax=vmax, interpolation="nearest")
        ax.set_axis_off()
        if title:
            ax.set_title(title)
        cb = fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
        if label:
            cb.set_label(label)


def plot_rgb(rgb, path, title=None):
    rgb = np.asarray(rgb)
    h, w, _ = rgb.shape
    with _figure(path, width=4.4, height=4.4 * h / w + 0.3) as (fig, ax):
        ax.imshow(np.clip(rgb, 0, 1), interpolation="nearest")
        ax.set_axis_off()
        if title:
            ax.set_title(title)
