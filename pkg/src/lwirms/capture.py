"""Forward imaging: temperature scenes to band frames."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, DomainError
from .plasmonics import FilterSpec, transmission_curve
from .sensor import (
    STREAM_TARGET,
    DetectorModel,
    Frame,
    detector_responsivity,
    frame_rng,
    make_dark_frame,
    quantize_counts,
)
from .spectral import (
    ZERO_CELSIUS,
    SpectralCurve,
    SpectralGrid,
    band_integral,
    constant_curve,
    default_grid,
)


@dataclass(frozen=True, eq=False)
class Scene:
    """Per-pixel temperature (Celsius) and graybody emissivity."""

    temperature_c: np.ndarray
    emissivity: Optional[np.ndarray] = None

    def __post_init__(self):
        t = np.array(self.temperature_c, dtype=float)
        if t.ndim != 2 or t.size == 0:
            raise DomainError("temperature map must be a non-empty 2-D array")
        if not np.all(np.isfinite(t)) or np.any(t <= -ZERO_CELSIUS):
            raise DomainError("temperatures must be finite and above absolute zero")
        eps = np.ones_like(t) if self.emissivity is None else np.array(
            self.emissivity, dtype=float)
        if eps.ndim == 0:
            eps = np.full_like(t, float(eps))
        if eps.shape != t.shape:
            raise DimensionError("emissivity map does not match temperature map")
        if np.any(~np.isfinite(eps)) or np.any(eps < 0) or np.any(eps > 1):
            raise DomainError("emissivity must lie in [0, 1]")
        t.setflags(write=False)
        eps.setflags(write=False)
        object.__setattr__(self, "temperature_c", t)
        object.__setattr__(self, "emissivity", eps)

    @classmethod
    def uniform(cls, width: int, height: int, temperature_c: float,
                emissivity: float = 1.0) -> "Scene":
        return cls(np.full((height, width), float(temperature_c)),
                   np.full((height, width), float(emissivity)))

    @property
    def width(self) -> int:
        return self.temperature_c.shape[1]

    @property
    def height(self) -> int:
        return self.temperature_c.shape[0]


def region_scene(width: int, height: int, temps_c: Sequence[float],
                 emissivity: float = 1.0) -> Scene:
    """Scene split into equal vertical strips, one per temperature."""
    cols = np.array_split(np.arange(width), len(temps_c))
    t = np.empty((height, width))
    for c, temp in zip(cols, temps_c):
        t[:, c] = temp
    return Scene(t, np.full_like(t, emissivity))


@dataclass(frozen=True)
class GeNotch:
    """Gaussian transmission dip of the germanium substrate (off unless given)."""

    center_um: float = 11.5
    depth: float = 0.2
    width_um: float = 0.3

    def __post_init__(self):
        if not 0 <= self.depth <= 1:
            raise DomainError("notch depth must lie in [0, 1]")
        if not self.width_um > 0:
            raise DomainError("notch width must be positive")

    def apply(self, curve: SpectralCurve) -> SpectralCurve:
        wl = curve.wavelengths
        dip = 1.0 - self.depth * np.exp(-0.5 * ((wl - self.center_um) / self.width_um) ** 2)
        return SpectralCurve(curve.grid, curve.values * dip, curve.kind)


def filter_curve(filt: Optional[FilterSpec], grid: SpectralGrid,
                 notch: Optional[GeNotch] = None) -> SpectralCurve:
    """Filter transmission on ``grid``; ``None`` is the unfiltered (monochrome) path."""
    if filt is None:
        return constant_curve(grid)
    S = transmission_curve(filt, grid)
    return notch.apply(S) if notch is not None else S


def radiance_signal(scene: Scene, filt: Optional[FilterSpec], detector: DetectorModel,
                    grid: Optional[SpectralGrid] = None,
                    notch: Optional[GeNotch] = None) -> np.ndarray:
    """Noise- and offset-free signal ``eps * n1 * integral(B S D)`` per pixel.

    The unit-emissivity signal is snapped to the detector's count grid before
    emissivity is applied.
    """
    grid = grid or default_grid()
    S = filter_curve(filt, grid, notch)
    D = detector_responsivity(detector, grid)
    temps, inverse = np.unique(scene.temperature_c, return_inverse=True)
    integrals = band_integral(temps + ZERO_CELSIUS, S, D)
    counts = quantize_counts(detector.n1 * integrals)
    return scene.emissivity * counts[inverse.reshape(scene.temperature_c.shape)]


def capture_frame(scene: Scene, filt: Optional[FilterSpec], detector: DetectorModel,
                  frame_index: int = 0, grid: Optional[SpectralGrid] = None,
                  notch: Optional[GeNotch] = None) -> Frame:
    if (scene.width, scene.height) != (detector.width, detector.height):
        raise DimensionError(
            f"scene is {scene.width}x{scene.height}, "
            f"detector is {detector.width}x{detector.height}"
        )
    data = detector.offset_map + radiance_signal(scene, filt, detector, grid, notch)
    if detector.noise_sigma > 0:
        rng = frame_rng(detector.seed, frame_index, STREAM_TARGET)
        data = data + rng.normal(0.0, detector.noise_sigma, size=data.shape)
    return Frame(data)


def blackbody_sweep(temps_c: Sequence[float], filt: Optional[FilterSpec],
                    detector: DetectorModel, grid: Optional[SpectralGrid] = None,
                    notch: Optional[GeNotch] = None) -> list[tuple[float, float]]:
    """Mean dark-corrected counts of a unit-emissivity blackbody at each temperature."""
    from .pipeline import flatfield_correct

    if len(temps_c) == 0:
        raise DomainError("temperature list is empty")
    grid = grid or default_grid()
    out = []
    for k, t in enumerate(temps_c):
        scene = Scene.uniform(detector.width, detector.height, t)
        target = capture_frame(scene, filt, detector, k, grid, notch)
        dark = make_dark_frame(detector, k)
        out.append((float(t), flatfield_correct(target, dark).mean()))
    return out


def _read_matrix(path: Path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def load_scene(path, width: Optional[int] = None, height: Optional[int] = None) -> Scene:
    """Read a scene JSON file.

    Keys: ``width``/``height`` (default to the detector's), then either
    ``temperature_c`` (uniform) or ``temperature_csv``, and optionally
    ``emissivity`` or ``emissivity_csv``. CSV matrices hold ``height`` rows of
    ``width`` values.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    return scene_from_dict(cfg, path.parent, width, height)


def scene_from_dict(cfg: dict, base_dir=Path("."), width=None, height=None) -> Scene:
    w = int(cfg.get("width", width or 80))
    h = int(cfg.get("height", height or 60))
    if "temperature_csv" in cfg:
        t = _read_matrix(Path(base_dir) / cfg["temperature_csv"])
    elif "temperature_c" in cfg:
        t = np.full((h, w), float(cfg["temperature_c"]))
    elif "regions_c" in cfg:
        t = region_scene(w, h, [float(v) for v in cfg["regions_c"]]).temperature_c
    else:
        raise DomainError("scene needs temperature_c, temperature_csv or regions_c")
    if t.shape != (h, w):
        raise DimensionError(f"temperature matrix is {t.shape}, scene declares {(h, w)}")
    if "emissivity_csv" in cfg:
        eps = _read_matrix(Path(base_dir) / cfg["emissivity_csv"])
    else:
        eps = np.full((h, w), float(cfg.get("emissivity", 1.0)))
    if eps.shape != (h, w):
        raise DimensionError(f"emissivity matrix is {eps.shape}, scene declares {(h, w)}")
    return Scene(t, eps)
