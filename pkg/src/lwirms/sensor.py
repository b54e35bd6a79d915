"""Microbolometer model and the :class:`Frame` type."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DimensionError, DomainError
from .spectral import (
    SpectralCurve,
    SpectralGrid,
    Temperature,
    band_integral,
    constant_curve,
    default_grid,
    read_curve_csv,
)

# noise stream tags, so target and dark frames never share draws
STREAM_TARGET = 0
STREAM_DARK = 1

FULL_SCALE = 65535
# calibration point for the default gain: a 150 C blackbody seen without a filter
GAIN_REFERENCE_C = 150.0
# readout grid: counts are fixed-point with 20 fractional bits, so sums of
# offsets and signals (and the dark subtraction) are exact in float64
COUNT_RESOLUTION = 2.0**-20


def quantize_counts(values):
    return np.round(np.asarray(values, dtype=float) / COUNT_RESOLUTION) * COUNT_RESOLUTION


@dataclass(frozen=True, eq=False)
class Frame:
    """Radiometric counts on a ``height x width`` grid.

    ``data[row, col]`` is pixel ``(x, y) = (col + 1, row + 1)`` in the
    one-based convention used for sensor coordinates.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise DomainError("frame data must be a non-empty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise DomainError("frame values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def pixel(self, x: int, y: int) -> float:
        if not (1 <= x <= self.width and 1 <= y <= self.height):
            raise IndexError(f"pixel ({x}, {y}) outside {self.width}x{self.height}")
        return float(self.data[y - 1, x - 1])

    def mean(self) -> float:
        return float(self.data.mean())


def check_same_shape(*frames: Frame) -> None:
    shapes = {f.shape for f in frames}
    if len(shapes) > 1:
        raise DimensionError(f"frame dimensions differ: {sorted(shapes)}")


def frame_rng(seed: int, frame_index: int, stream: int) -> np.random.Generator:
    """Counter-style generator keyed by (seed, frame index, stream).

    Pixel k of a frame always receives the k-th draw of this stream, so a
    frame's noise depends only on the key, never on evaluation order.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, frame_index, stream]))


def raised_cosine_band(wavelengths, lo: float, hi: float, rolloff: float):
    wl = np.asarray(wavelengths, dtype=float)
    out = np.zeros_like(wl)
    if rolloff <= 0:
        out[(wl >= lo) & (wl <= hi)] = 1.0
        return out
    rise = (wl >= lo) & (wl < lo + rolloff)
    fall = (wl > hi - rolloff) & (wl <= hi)
    flat = (wl >= lo + rolloff) & (wl <= hi - rolloff)
    out[flat] = 1.0
    out[rise] = 0.5 * (1.0 - np.cos(np.pi * (wl[rise] - lo) / rolloff))
    out[fall] = 0.5 * (1.0 - np.cos(np.pi * (hi - wl[fall]) / rolloff))
    return out


@dataclass(frozen=True, eq=False)
class DetectorModel:
    """Monochrome 8-14 um microbolometer.

    Use :meth:`build` to construct one: it draws the fixed-pattern offset map
    from ``seed`` and derives the default gain.
    """

    width: int
    height: int
    band_um: tuple[float, float]
    rolloff_um: float
    n1: float
    offset_map: np.ndarray
    noise_sigma: float = 0.0
    seed: int = 0
    responsivity_override: Optional[SpectralCurve] = None
    offset_range: tuple[float, float] = (90.0, 110.0)

    def __post_init__(self):
        lo, hi = (float(v) for v in self.band_um)
        object.__setattr__(self, "band_um", (lo, hi))
        if not lo < hi:
            raise DomainError("detector band needs lo < hi")
        if self.rolloff_um < 0 or 2 * self.rolloff_um > hi - lo:
            raise DomainError("rolloff must be >= 0 and fit inside the band")
        if not self.n1 > 0:
            raise DomainError("gain n1 must be positive")
        if self.noise_sigma < 0:
            raise DomainError("noise sigma must be >= 0")
        offsets = quantize_counts(self.offset_map)
        if offsets.shape != (self.height, self.width):
            raise DimensionError(
                f"offset map is {offsets.shape}, detector is {(self.height, self.width)}"
            )
        offsets.setflags(write=False)
        object.__setattr__(self, "offset_map", offsets)

    @classmethod
    def build(cls, width: int = 80, height: int = 60,
              band_um: tuple[float, float] = (8.0, 14.0), rolloff_um: float = 0.5,
              n1: Optional[float] = None,
              offset_range: tuple[float, float] = (90.0, 110.0),
              offset_map: Optional[np.ndarray] = None,
              noise_sigma: float = 0.0, seed: int = 0,
              responsivity_override: Optional[SpectralCurve] = None,
              grid: Optional[SpectralGrid] = None) -> "DetectorModel":
        lo, hi = (float(v) for v in offset_range)
        if lo > hi:
            raise DomainError("offset range needs lo <= hi")
        if offset_map is None:
            rng = np.random.default_rng(seed)
            offset_map = rng.uniform(lo, hi, size=(height, width))
        model = cls(width, height, tuple(band_um), rolloff_um, 1.0, offset_map,
                    noise_sigma, seed, responsivity_override, (lo, hi))
        if n1 is None:
            n1 = default_gain(model, grid or default_grid())
        return cls(width, height, tuple(band_um), rolloff_um, float(n1), offset_map,
                   noise_sigma, seed, responsivity_override, (lo, hi))

    def with_offsets(self, offset_map) -> "DetectorModel":
        return DetectorModel(self.width, self.height, self.band_um, self.rolloff_um,
                             self.n1, offset_map, self.noise_sigma, self.seed,
                             self.responsivity_override, self.offset_range)

    def with_noise(self, noise_sigma: float) -> "DetectorModel":
        return DetectorModel(self.width, self.height, self.band_um, self.rolloff_um,
                             self.n1, self.offset_map, noise_sigma, self.seed,
                             self.responsivity_override, self.offset_range)

    def to_config(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "band_um": list(self.band_um),
            "rolloff_um": self.rolloff_um,
            "n1": self.n1,
            "offset_range": list(self.offset_range),
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
        }


def detector_responsivity(model: DetectorModel, grid: SpectralGrid) -> SpectralCurve:
    """Combined lens x detector response: flat top with raised-cosine edges."""
    if model.responsivity_override is not None:
        return model.responsivity_override.resample(grid)
    lo, hi = model.band_um
    vals = raised_cosine_band(grid.wavelengths, lo, hi, model.rolloff_um)
    return SpectralCurve(grid, vals, "transmission")


def default_gain(model: DetectorModel, grid: SpectralGrid) -> float:
    """Gain putting an unfiltered 150 C blackbody at half of 16-bit full scale."""
    D = detector_responsivity(model, grid)
    ref = band_integral(Temperature.from_celsius(GAIN_REFERENCE_C),
                        constant_curve(grid), D)
    return (FULL_SCALE + 1) / 2 / ref


def make_dark_frame(model: DetectorModel, frame_index: int = 0) -> Frame:
    data = model.offset_map
    if model.noise_sigma > 0:
        rng = frame_rng(model.seed, frame_index, STREAM_DARK)
        data = data + rng.normal(0.0, model.noise_sigma, size=data.shape)
    return Frame(data)


def load_camera_config(path, grid: Optional[SpectralGrid] = None) -> DetectorModel:
    """Build a detector from a camera JSON file.

    Keys (all optional): ``width``, ``height``, ``band_um``, ``rolloff_um``,
    ``n1``, ``offset_range``, ``noise_sigma``, ``seed``, ``responsivity_csv``.
    Relative CSV paths resolve against the config file's directory.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    return camera_from_dict(cfg, base_dir=path.parent, grid=grid)


def camera_from_dict(cfg: dict, base_dir=Path("."), grid=None) -> DetectorModel:
    known = {"width", "height", "band_um", "rolloff_um", "n1", "offset_range",
             "noise_sigma", "seed", "responsivity_csv"}
    unknown = set(cfg) - known
    if unknown:
        raise DomainError(f"unknown camera config keys: {sorted(unknown)}")
    override = None
    if cfg.get("responsivity_csv"):
        override = read_curve_csv(Path(base_dir) / cfg["responsivity_csv"])
    return DetectorModel.build(
        width=int(cfg.get("width", 80)),
        height=int(cfg.get("height", 60)),
        band_um=tuple(cfg.get("band_um", (8.0, 14.0))),
        rolloff_um=float(cfg.get("rolloff_um", 0.5)),
        n1=cfg.get("n1"),
        offset_range=tuple(cfg.get("offset_range", (90.0, 110.0))),
        noise_sigma=float(cfg.get("noise_sigma", 0.0)),
        seed=int(cfg.get("seed", 0)),
        responsivity_override=override,
        grid=grid,
    )

