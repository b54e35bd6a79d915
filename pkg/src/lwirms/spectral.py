"""Wavelength grids, sampled spectral curves and blackbody radiance.

All wavelengths are in micrometres and spectral radiance is expressed per
micrometre, so curves sampled on a micrometre grid integrate directly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DomainError

# CODATA 2018 exact values
PLANCK_H = 6.62607015e-34  # J s
SPEED_OF_LIGHT = 299792458.0  # m / s
BOLTZMANN_K = 1.380649e-23  # J / K
ZERO_CELSIUS = 273.15

GRID_MIN_UM = 1.0
GRID_MAX_UM = 30.0

DEFAULT_GRID_START = 6.0
DEFAULT_GRID_STOP = 16.0
DEFAULT_GRID_STEP = 0.01

CURVE_KINDS = ("transmission", "radiance")


@dataclass(frozen=True)
class Temperature:
    """Absolute temperature. Stored in kelvin, reported in Celsius at the edges."""

    kelvin: float

    def __post_init__(self):
        if not np.isfinite(self.kelvin) or self.kelvin <= 0:
            raise DomainError(f"temperature must be > 0 K, got {self.kelvin}")

    @classmethod
    def from_celsius(cls, celsius: float) -> "Temperature":
        return cls(float(celsius) + ZERO_CELSIUS)

    @property
    def celsius(self) -> float:
        return self.kelvin - ZERO_CELSIUS


TemperatureLike = Union[Temperature, float]


def _as_kelvin(T) -> np.ndarray:
    if isinstance(T, Temperature):
        return np.asarray(T.kelvin, dtype=float)
    return np.asarray(T, dtype=float)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpectralGrid:
    """Strictly increasing wavelength samples in [1, 30] um."""

    wavelengths: np.ndarray

    def __post_init__(self):
        wl = _frozen(self.wavelengths)
        if wl.ndim != 1 or wl.size < 2:
            raise DomainError("a spectral grid needs at least 2 samples")
        if not np.all(np.isfinite(wl)):
            raise DomainError("grid wavelengths must be finite")
        if np.any(np.diff(wl) <= 0):
            raise DomainError("grid wavelengths must be strictly increasing")
        if wl[0] < GRID_MIN_UM or wl[-1] > GRID_MAX_UM:
            raise DomainError(
                f"grid wavelengths must lie in [{GRID_MIN_UM}, {GRID_MAX_UM}] um"
            )
        object.__setattr__(self, "wavelengths", wl)

    @classmethod
    def uniform(cls, start: float = DEFAULT_GRID_START, stop: float = DEFAULT_GRID_STOP,
                step: float = DEFAULT_GRID_STEP) -> "SpectralGrid":
        if step <= 0 or stop <= start:
            raise DomainError("uniform grid needs start < stop and step > 0")
        n = int(round((stop - start) / step)) + 1
        return cls(np.linspace(start, stop, n))

    def __len__(self):
        return self.wavelengths.size

    @property
    def min_step(self) -> float:
        return float(np.min(np.diff(self.wavelengths)))

    def __eq__(self, other):
        if not isinstance(other, SpectralGrid):
            return NotImplemented
        return np.array_equal(self.wavelengths, other.wavelengths)

    def __hash__(self):
        return hash(self.wavelengths.tobytes())


def default_grid() -> SpectralGrid:
    """6-16 um at 0.01 um: the LWIR window plus margin for filter tails."""
    return SpectralGrid.uniform()


@dataclass(frozen=True, eq=False)
class SpectralCurve:
    """A function of wavelength sampled on a :class:`SpectralGrid`.

    ``kind`` selects the value constraint: transmission curves must lie in
    [0, 1], radiance curves must be non-negative.
    """

    grid: SpectralGrid
    values: np.ndarray
    kind: str = "transmission"

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (len(self.grid),):
            raise DomainError("curve values must match the grid length")
        if not np.all(np.isfinite(vals)):
            raise DomainError("curve values must be finite")
        if self.kind not in CURVE_KINDS:
            raise DomainError(f"unknown curve kind {self.kind!r}")
        if np.any(vals < 0):
            raise DomainError(f"{self.kind} curve has negative values")
        if self.kind == "transmission" and np.any(vals > 1):
            raise DomainError("transmission curve has values above 1")
        object.__setattr__(self, "values", vals)

    @property
    def wavelengths(self) -> np.ndarray:
        return self.grid.wavelengths

    def resample(self, grid: SpectralGrid) -> "SpectralCurve":
        """Linear interpolation onto ``grid``; zero outside this curve's support."""
        if grid == self.grid:
            return self
        vals = np.interp(grid.wavelengths, self.wavelengths, self.values,
                         left=0.0, right=0.0)
        return SpectralCurve(grid, vals, self.kind)

    def __mul__(self, other: "SpectralCurve") -> "SpectralCurve":
        a, b = align(self, other)
        kind = "transmission" if a.kind == b.kind == "transmission" else "radiance"
        return SpectralCurve(a.grid, a.values * b.values, kind)


def constant_curve(grid: SpectralGrid, value: float = 1.0,
                   kind: str = "transmission") -> SpectralCurve:
    return SpectralCurve(grid, np.full(len(grid), float(value)), kind)


def align(a: SpectralCurve, b: SpectralCurve) -> tuple[SpectralCurve, SpectralCurve]:
    """Put two curves on a common grid, the finer of the two."""
    if a.grid == b.grid:
        return a, b
    if b.grid.min_step < a.grid.min_step:
        return a.resample(b.grid), b
    return a, b.resample(a.grid)


def planck_spectral_radiance(lambda_um, T: TemperatureLike):
    """Blackbody spectral radiance in W m^-2 sr^-1 um^-1.

    Vectorised over both arguments. ``T`` is in kelvin (or a
    :class:`Temperature`).
    """
    lam = np.asarray(lambda_um, dtype=float)
    kelvin = _as_kelvin(T)
    if np.any(~np.isfinite(lam)) or np.any(lam <= 0):
        raise DomainError("wavelength must be positive")
    if np.any(~np.isfinite(kelvin)) or np.any(kelvin <= 0):
        raise DomainError("temperature must be positive")
    lam_m = lam * 1e-6
    x = PLANCK_H * SPEED_OF_LIGHT / (lam_m * BOLTZMANN_K * kelvin)
    with np.errstate(over="ignore"):
        b = 2.0 * PLANCK_H * SPEED_OF_LIGHT**2 / lam_m**5 / np.expm1(x)
    b = b * 1e-6
    return float(b) if np.ndim(b) == 0 else b


def integrate(curve: SpectralCurve) -> float:
    """Trapezoidal integral of a curve over its own grid."""
    return float(np.trapezoid(curve.values, curve.wavelengths))


def band_integral(T, S: SpectralCurve, D: SpectralCurve):
    """``integral of B(lambda, T) S(lambda) D(lambda)`` for one or many temperatures.

    ``T`` may be an array of kelvin values; the result then has the same shape.
    """
    S, D = align(S, D)
    wl = S.wavelengths
    sd = S.values * D.values
    kelvin = _as_kelvin(T)
    flat = kelvin.reshape(-1)
    radiance = planck_spectral_radiance(wl[None, :], flat[:, None])
    out = np.trapezoid(radiance * sd[None, :], wl, axis=1)
    if kelvin.ndim == 0:
        return float(out[0])
    return out.reshape(kelvin.shape)


def band_flux(T: TemperatureLike, S: SpectralCurve, D: SpectralCurve,
              n0: float, n1: float) -> float:
    """Sensor counts ``n0 + n1 * integral of B(T) S D`` for one band."""
    return float(n0 + n1 * band_integral(T, S, D))


def read_curve_csv(path, kind: str = "transmission") -> SpectralCurve:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["wavelength_um", "value"]:
            raise DomainError(f"{path}: expected header 'wavelength_um,value'")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    if not rows:
        raise DomainError(f"{path}: no samples")
    wl, vals = zip(*rows)
    return SpectralCurve(SpectralGrid(np.array(wl)), np.array(vals), kind)


def write_curve_csv(curve: SpectralCurve, path) -> None:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["wavelength_um", "value"])
        for wl, v in zip(curve.wavelengths, curve.values):
            writer.writerow([repr(float(wl)), repr(float(v))])
