"""Resonance model for hexagonal hole-array filters.

Hole-array filters transmit near the surface-plasmon resonance set by the
lattice pitch and the permittivities of the metal and the surrounding
dielectric. The line shape itself is a Lorentzian parameterised by the
measured width and peak transmission.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, NoBoundModeError
from .spectral import SpectralCurve, SpectralGrid

DEFAULT_FWHM_UM = 1.35
DEFAULT_PEAK = 0.60
DEFAULT_ASPECT_RATIO = 0.6


@dataclass(frozen=True)
class DielectricMaterial:
    name: str
    n_d: float

    def __post_init__(self):
        if not self.n_d > 1:
            raise DomainError(f"{self.name}: refractive index must be > 1")

    @property
    def permittivity(self) -> float:
        return self.n_d**2


GERMANIUM = DielectricMaterial("ge", 4.0)
GALLIUM_ARSENIDE = DielectricMaterial("gaas", 3.3)
SILICA = DielectricMaterial("sio2", 1.47)

MATERIALS = {m.name: m for m in (GERMANIUM, GALLIUM_ARSENIDE, SILICA)}


def load_materials(path=None) -> dict[str, DielectricMaterial]:
    """Built-in catalog, optionally extended/overridden from a JSON file.

    The file holds either a list of ``{"name": ..., "n_d": ...}`` objects or a
    single such object.
    """
    catalog = dict(MATERIALS)
    if path is None:
        return catalog
    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    if isinstance(entries, dict):
        entries = [entries]
    for entry in entries:
        mat = DielectricMaterial(str(entry["name"]).lower(), float(entry["n_d"]))
        catalog[mat.name] = mat
    return catalog


def get_material(name: str, catalog: Optional[dict] = None) -> DielectricMaterial:
    catalog = MATERIALS if catalog is None else catalog
    try:
        return catalog[name.lower()]
    except KeyError:
        raise DomainError(
            f"unknown dielectric {name!r}; known: {', '.join(sorted(catalog))}"
        ) from None


@dataclass(frozen=True)
class FilterSpec:
    """Geometry and line shape of one hole-array filter.

    ``aspect_ratio`` (hole diameter over pitch) is carried as metadata only;
    width and peak are set explicitly. ``center_um_override`` replaces the
    predicted resonance, and ``curve`` replaces the whole modelled line shape
    (e.g. with measured FTIR data).
    """

    pitch_um: float
    dielectric: DielectricMaterial = GERMANIUM
    aspect_ratio: float = DEFAULT_ASPECT_RATIO
    order: tuple[int, int] = (1, 0)
    center_um_override: Optional[float] = None
    fwhm_um: float = DEFAULT_FWHM_UM
    peak_transmission: float = DEFAULT_PEAK
    curve: Optional[SpectralCurve] = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(k) for k in self.order))
        if not self.pitch_um > 0:
            raise DomainError("pitch must be positive")
        if not 0 < self.aspect_ratio < 1:
            raise DomainError("aspect ratio must lie in (0, 1)")
        if self.order == (0, 0):
            raise DomainError("scattering order (0, 0) has no resonance")
        if not 0 < self.peak_transmission <= 1:
            raise DomainError("peak transmission must lie in (0, 1]")
        if not self.fwhm_um > 0:
            raise DomainError("FWHM must be positive")
        if self.center_um_override is not None and not self.center_um_override > 0:
            raise DomainError("center override must be positive")

    @property
    def center_um(self) -> float:
        if self.center_um_override is not None:
            return float(self.center_um_override)
        return spp_wavelength_approx(self.pitch_um, self.dielectric, self.order)


def _lattice_factor(order) -> float:
    i, j = (int(k) for k in order)
    if (i, j) == (0, 0):
        raise DomainError("scattering order (0, 0) has no resonance")
    return math.sqrt(4.0 / 3.0 * (i * i + j * j + i * j))


def spp_wavelength_exact(spec: FilterSpec, epsilon_m: float) -> float:
    """Resonance wavelength including the finite metal permittivity.

    Raises :class:`NoBoundModeError` when ``epsilon_m + epsilon_d >= 0``.
    """
    eps_d = spec.dielectric.permittivity
    eps_m = float(epsilon_m)
    if not math.isfinite(eps_m):
        raise DomainError("metal permittivity must be finite")
    denom = eps_m + eps_d
    if denom >= 0:
        raise NoBoundModeError(
            f"no bound mode: eps_M + eps_D = {denom:g} is not negative"
        )
    return spec.pitch_um / _lattice_factor(spec.order) * math.sqrt(eps_m * eps_d / denom)


def spp_wavelength_approx(pitch_um: float, dielectric: DielectricMaterial,
                          order=(1, 0)) -> float:
    """Large-|eps_M| limit: ``pitch * n_D / lattice factor``.

    For the first order (1, 0) this is ``sqrt(3) * pitch * n_D / 2``.
    """
    if not pitch_um > 0:
        raise DomainError("pitch must be positive")
    return pitch_um / _lattice_factor(order) * dielectric.n_d


def pitch_for_wavelength(target_um: float, dielectric: DielectricMaterial) -> float:
    """First-order pitch that puts the resonance at ``target_um``."""
    if not target_um > 0:
        raise DomainError("target wavelength must be positive")
    return 2.0 * target_um / (math.sqrt(3.0) * dielectric.n_d)


def lorentzian(wavelengths, center: float, fwhm: float, peak: float):
    half = 0.5 * fwhm
    wl = np.asarray(wavelengths, dtype=float)
    return peak * half**2 / ((wl - center) ** 2 + half**2)


def transmission_curve(spec: FilterSpec, grid: SpectralGrid) -> SpectralCurve:
    if spec.curve is not None:
        return spec.curve.resample(grid)
    vals = lorentzian(grid.wavelengths, spec.center_um, spec.fwhm_um,
                      spec.peak_transmission)
    return SpectralCurve(grid, vals, "transmission")


def sweep_center_vs_pitch(pitches: Sequence[float], dielectric: DielectricMaterial,
                          order=(1, 0)) -> list[tuple[float, float]]:
    if len(pitches) == 0:
        raise DomainError("pitch list is empty")
    return [(float(p), spp_wavelength_approx(p, dielectric, order)) for p in pitches]


def measure_fwhm(curve: SpectralCurve) -> float:
    """Width of the region at or above half maximum, on the curve's own grid."""
    vals = curve.values
    wl = curve.wavelengths
    half = 0.5 * vals.max()
    above = np.nonzero(vals >= half)[0]
    lo, hi = above[0], above[-1]

    def crossing(i0, i1):
        v0, v1 = vals[i0], vals[i1]
        if v1 == v0:
            return wl[i0]
        return wl[i0] + (half - v0) * (wl[i1] - wl[i0]) / (v1 - v0)

    left = crossing(lo - 1, lo) if lo > 0 else wl[0]
    right = crossing(hi, hi + 1) if hi < len(wl) - 1 else wl[-1]
    return float(right - left)


def default_filters(dielectric: DielectricMaterial = GERMANIUM) -> list[FilterSpec]:
    """The three fabricated pitches: 2.5, 3.0 and 3.5 um."""
    return [
        FilterSpec(p, dielectric, name=f"band{k}")
        for k, p in enumerate((2.5, 3.0, 3.5), start=1)
    ]
