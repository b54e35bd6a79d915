import numpy as np

from lwirms import plotting
from lwirms.pipeline import fit_calibration
from lwirms.plasmonics import GERMANIUM, SILICA, default_filters, sweep_center_vs_pitch, transmission_curve
from lwirms.spectral import default_grid


def _is_png(path):
    return path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_figures_written(tmp_path):
    grid = default_grid()
    curves = [(f.name, transmission_curve(f, grid)) for f in default_filters()]
    plotting.plot_transmission(curves, tmp_path / "t.png", title="filters")
    samples = {"band1": [(t, 3 * t + 2) for t in (50.0, 100.0, 150.0)]}
    plotting.plot_calibration(samples, {"band1": fit_calibration(samples["band1"], 1)},
                              tmp_path / "c.png")
    plotting.plot_pitch_sweep({m.name: sweep_center_vs_pitch([2, 3, 4], m) for m in (GERMANIUM, SILICA)},
                              tmp_path / "s.png")
    plotting.plot_frame(np.random.default_rng(0).normal(size=(6, 8)), tmp_path / "f.png", label="x")
    plotting.plot_rgb(np.random.default_rng(1).uniform(size=(6, 8, 3)), tmp_path / "r.png")
    for name in "tcsfr":
        assert _is_png(tmp_path / f"{name}.png")
