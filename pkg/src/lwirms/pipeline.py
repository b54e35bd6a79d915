"""Processing chain: dark-frame correction, calibration, band maths, fusion,
upscaling and a no-reference sharpness score."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import CalibrationError, DomainError
from .sensor import Frame, check_same_shape

NTVI_EPS = 1e-9
BISECTION_TOL_C = 0.01


def flatfield_correct(target: Frame, dark: Frame) -> Frame:
    """Subtract the dark reference frame pixel by pixel."""
    check_same_shape(target, dark)
    return Frame(target.data - dark.data)


# -- calibration -------------------------------------------------------------

@dataclass(frozen=True)
class CalibrationCurve:
    """Counts as a polynomial in source temperature (Celsius).

    ``coeffs`` are in ascending powers. The curve is strictly increasing over
    ``domain_c``, which makes it invertible there.
    """

    band_id: str
    degree: int
    coeffs: tuple[float, ...]
    domain_c: tuple[float, float]
    r_squared: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        object.__setattr__(self, "domain_c", tuple(float(v) for v in self.domain_c))
        if self.degree < 1 or len(self.coeffs) != self.degree + 1:
            raise CalibrationError("coefficient count must be degree + 1, degree >= 1")
        if not self.domain_c[0] < self.domain_c[1]:
            raise CalibrationError("calibration domain needs T_min < T_max")
        if not 0.0 <= self.r_squared <= 1.0:
            raise CalibrationError("r_squared must lie in [0, 1]")
        if not _increasing_on(self.coeffs, *self.domain_c):
            raise CalibrationError("non-invertible calibration: counts not increasing")

    def counts(self, temperature_c):
        return P.polyval(temperature_c, self.coeffs)

    def to_dict(self) -> dict:
        return {
            "band_id": self.band_id,
            "degree": self.degree,
            "coeffs": list(self.coeffs),
            "domain_c": list(self.domain_c),
            "r_squared": self.r_squared,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationCurve":
        try:
            return cls(str(d["band_id"]), int(d["degree"]), d["coeffs"],
                       d["domain_c"], float(d["r_squared"]))
        except KeyError as exc:
            raise DomainError(f"calibration JSON missing key {exc}") from None

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "CalibrationCurve":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _increasing_on(coeffs, lo: float, hi: float) -> bool:
    # the derivative is smallest at an endpoint or at a root of the second derivative
    d1 = P.polyder(coeffs)
    d2 = P.polyder(d1)
    candidates = [lo, hi]
    if len(d2) > 1 and np.any(d2 != 0):
        roots = P.polyroots(d2)
        candidates += [r.real for r in roots
                       if abs(r.imag) < 1e-12 and lo <= r.real <= hi]
    return bool(np.all(P.polyval(np.array(candidates), d1) > 0))


def fit_calibration(samples: Sequence[tuple[float, float]], degree: int = 1,
                    band_id: str = "band") -> CalibrationCurve:
    """Least-squares polynomial fit of counts against temperature."""
    if degree < 1:
        raise CalibrationError("degree must be >= 1")
    temps = np.array([s[0] for s in samples], dtype=float)
    counts = np.array([s[1] for s in samples], dtype=float)
    if len(np.unique(temps)) != len(temps):
        raise CalibrationError("calibration temperatures must be distinct")
    if len(temps) < degree + 1:
        raise CalibrationError(
            f"underdetermined: {len(temps)} samples for degree {degree}"
        )
    coeffs = P.polyfit(temps, counts, degree)
    resid = counts - P.polyval(temps, coeffs)
    ss_tot = float(np.sum((counts - counts.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    r2 = min(max(r2, 0.0), 1.0)
    domain = (float(temps.min()), float(temps.max()))
    if not _increasing_on(coeffs, *domain):
        raise CalibrationError("non-invertible calibration: fitted counts not increasing")
    return CalibrationCurve(band_id, degree, tuple(coeffs), domain, r2)


def counts_to_temperature(frame: Frame, calib: CalibrationCurve,
                          tol_c: float = BISECTION_TOL_C) -> tuple[np.ndarray, np.ndarray]:
    """Invert the calibration pixel by pixel.

    Returns ``(temperature_c, saturated)``. Counts outside the calibrated
    range clamp to the domain endpoints and are flagged in ``saturated``.
    """
    lo_t, hi_t = calib.domain_c
    y = frame.data
    lo_c, hi_c = calib.counts(lo_t), calib.counts(hi_t)
    below = y <= lo_c
    above = y >= hi_c
    lo = np.full(y.shape, lo_t)
    hi = np.full(y.shape, hi_t)
    n_iter = max(1, math.ceil(math.log2((hi_t - lo_t) / tol_c)))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        up = calib.counts(mid) < y
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    temps = 0.5 * (lo + hi)
    temps[below] = lo_t
    temps[above] = hi_t
    saturated = (y < lo_c) | (y > hi_c)
    return temps, saturated


# -- band maths ---------------------------------------------------------------

def ntvi(band_x: Frame, band_y: Frame, eps: float = NTVI_EPS) -> Frame:
    """Normalised temperature variation index ``(x - y) / (x + y)``.

    Pixels whose denominator is below ``eps`` in magnitude map to 0.
    """
    check_same_shape(band_x, band_y)
    x, y = band_x.data, band_y.data
    num = x - y
    den = x + y
    guarded = np.abs(den) < eps
    out = np.divide(num, np.where(guarded, 1.0, den))
    out[guarded] = 0.0
    return Frame(out)


@dataclass(frozen=True, eq=False)
class BandSet:
    bands: tuple[Frame, Frame, Frame]

    def __post_init__(self):
        bands = tuple(self.bands)
        if len(bands) != 3:
            raise DomainError(f"a band set holds exactly 3 frames, got {len(bands)}")
        check_same_shape(*bands)
        object.__setattr__(self, "bands", bands)


def normalize_minmax(data: np.ndarray) -> np.ndarray:
    lo, hi = float(data.min()), float(data.max())
    if hi == lo:
        return np.zeros_like(data, dtype=float)
    return (data - lo) / (hi - lo)


def fuse_false_color(bands: BandSet) -> np.ndarray:
    """RGB image (``height x width x 3`` in [0, 1]) from bands 1, 2, 3."""
    return np.stack([normalize_minmax(b.data) for b in bands.bands], axis=-1)


# -- resampling ----------------------------------------------------------------

def _cubic_weights(t: np.ndarray, a: float = -0.5) -> np.ndarray:
    """Catmull-Rom weights for taps at offsets -1, 0, 1, 2 from the base sample."""
    d = np.stack([1 + t, t, 1 - t, 2 - t], axis=-1)
    near = (a + 2) * d**3 - (a + 3) * d**2 + 1
    far = a * d**3 - 5 * a * d**2 + 8 * a * d - 4 * a
    return np.where(d <= 1, near, far)


def _upscale_axis(data: np.ndarray, factor: int, axis: int) -> np.ndarray:
    data = np.moveaxis(data, axis, 0)
    n = data.shape[0]
    # pixel-centre alignment between input and output grids
    src = (np.arange(n * factor) + 0.5) / factor - 0.5
    base = np.floor(src).astype(int)
    t = src - base
    w = _cubic_weights(t)
    taps = np.clip(base[:, None] + np.arange(-1, 3)[None, :], 0, n - 1)
    centre = data[np.clip(base, 0, n - 1)]
    # interpolate differences from the centre tap so constants come out exact
    diffs = data[taps] - centre[:, None]
    wshape = w.shape + (1,) * (data.ndim - 1)
    out = centre + np.sum(w.reshape(wshape) * diffs, axis=1)
    return np.moveaxis(out, 0, axis)


def upscale(frame: Frame, factor: int = 4) -> Frame:
    """Catmull-Rom bicubic upscaling with clamp-to-edge borders."""
    if int(factor) != factor or factor < 1:
        raise DomainError("upscale factor must be an integer >= 1")
    factor = int(factor)
    if factor == 1:
        return Frame(frame.data.copy())
    out = _upscale_axis(frame.data, factor, 0)
    out = _upscale_axis(out, factor, 1)
    return Frame(out)


# -- quality -------------------------------------------------------------------

_SOBEL = np.array([[1, 0, -1], [2, 0, -2], [1, 0, -1]], dtype=float)


def _correlate3(data: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    padded = np.pad(data, 1, mode="edge")
    h, w = data.shape
    out = np.zeros_like(data)
    for i in range(3):
        for j in range(3):
            if kernel[i, j]:
                out += kernel[i, j] * padded[i:i + h, j:j + w]
    return out


def sharpness_score(frame: Frame) -> float:
    """Mean Sobel gradient magnitude divided by the frame's dynamic range.

    Zero for constant frames and unchanged by affine intensity maps. Stands in
    for perceptual no-reference metrics such as NIQE. Note the Sobel pair has
    no response to a one-pixel checkerboard (the Nyquist pattern).
    """
    if frame.width < 3 or frame.height < 3:
        raise DomainError("sharpness needs a frame of at least 3x3 pixels")
    data = frame.data
    span = float(data.max() - data.min())
    if span == 0:
        return 0.0
    norm = (data - data.min()) / span
    gx = _correlate3(norm, _SOBEL)
    gy = _correlate3(norm, _SOBEL.T)
    return float(np.mean(np.hypot(gx, gy)))

