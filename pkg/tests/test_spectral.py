import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lwirms.errors import DomainError
from lwirms.spectral import (
    SpectralCurve,
    SpectralGrid,
    Temperature,
    band_flux,
    band_integral,
    constant_curve,
    default_grid,
    integrate,
    planck_spectral_radiance,
    read_curve_csv,
    write_curve_csv,
)

WIEN_B_UM_K = 2897.771955
STEFAN_BOLTZMANN = 5.670374419e-8


def test_wien_peak_300k():
    wl = np.round(np.arange(1.0, 30.0 + 5e-4, 0.001), 6)
    peak = wl[np.argmax(planck_spectral_radiance(wl, 300.0))]
    assert peak == pytest.approx(WIEN_B_UM_K / 300.0, abs=0.002)


def test_stefan_boltzmann_integral():
    # geometric grid resolves both the Wien tail and the long-wave tail
    wl = np.geomspace(0.1, 1000.0, 200_001)
    total = math.pi * np.trapezoid(planck_spectral_radiance(wl, 300.0), wl)
    assert total == pytest.approx(STEFAN_BOLTZMANN * 300.0**4, rel=0.01)
    assert STEFAN_BOLTZMANN * 300.0**4 == pytest.approx(459.3, abs=0.05)


def test_planck_monotone_in_temperature():
    assert planck_spectral_radiance(10.0, 400.0) > planck_spectral_radiance(10.0, 300.0)
    temps = np.linspace(200, 600, 50)
    vals = planck_spectral_radiance(10.0, temps)
    assert np.all(np.diff(vals) > 0)


def test_planck_accepts_temperature_object():
    t = Temperature.from_celsius(26.85)
    assert planck_spectral_radiance(10.0, t) == pytest.approx(planck_spectral_radiance(10.0, 300.0))
    assert t.celsius == pytest.approx(26.85)


@pytest.mark.parametrize("lam,T", [(0.0, 300.0), (-1.0, 300.0), (10.0, 0.0), (10.0, -5.0)])
def test_planck_domain_errors(lam, T):
    with pytest.raises(DomainError):
        planck_spectral_radiance(lam, T)


def test_planck_no_overflow_at_short_wavelength():
    assert planck_spectral_radiance(1.0, 50.0) >= 0.0


def test_temperature_must_be_positive():
    with pytest.raises(DomainError):
        Temperature(0.0)


@pytest.mark.parametrize("wl", [[8.0], [8.0, 8.0], [9.0, 8.0], [0.5, 8.0], [8.0, 31.0]])
def test_grid_invariants(wl):
    with pytest.raises(DomainError):
        SpectralGrid(np.array(wl))


def test_default_grid():
    g = default_grid()
    assert len(g) == 1001
    assert g.wavelengths[0] == 6.0 and g.wavelengths[-1] == 16.0


def test_curve_invariants():
    g = SpectralGrid.uniform(8, 14, 1.0)
    with pytest.raises(DomainError):
        SpectralCurve(g, np.ones(3))
    with pytest.raises(DomainError):
        SpectralCurve(g, np.full(7, 1.5))
    with pytest.raises(DomainError):
        SpectralCurve(g, np.full(7, -0.1), "radiance")
    SpectralCurve(g, np.full(7, 1.5), "radiance")


def test_integrate_examples():
    g = SpectralGrid.uniform(8.0, 14.0, 0.5)
    assert integrate(constant_curve(g)) == pytest.approx(6.0, abs=1e-12)
    assert integrate(constant_curve(g, 0.0)) == 0.0
    ramp = SpectralCurve(g, (g.wavelengths - 8.0) / 6.0)
    assert integrate(ramp) == pytest.approx(3.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2**32 - 1))
def test_integrate_linearity(a, b, seed):
    g = SpectralGrid.uniform(8.0, 14.0, 0.05)
    rng = np.random.default_rng(seed)
    f, h = rng.uniform(0, 1, len(g)), rng.uniform(0, 1, len(g))
    combo = a * f + b * h
    lhs = float(np.trapezoid(combo, g.wavelengths))
    rhs = a * integrate(SpectralCurve(g, f)) + b * integrate(SpectralCurve(g, h))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_band_flux_gain_zero_gives_offset():
    g = default_grid()
    assert band_flux(350.0, constant_curve(g), constant_curve(g), 123.0, 0.0) == 123.0


def test_band_flux_unit_curves_reduce_to_planck_integral():
    g = SpectralGrid.uniform(8.0, 14.0, 0.01)
    wl = g.wavelengths
    direct = np.trapezoid(planck_spectral_radiance(wl, 320.0), wl)
    assert band_flux(320.0, constant_curve(g), constant_curve(g), 0.0, 1.0) == pytest.approx(direct, rel=1e-12)


def test_band_flux_narrow_band_ratio():
    fine = SpectralGrid.uniform(9.9, 10.1, 0.001)
    rect = SpectralCurve(fine, (np.abs(fine.wavelengths - 10.0) <= 0.01 + 1e-9).astype(float))
    D = constant_curve(default_grid())
    ratio = band_flux(400.0, rect, D, 0, 1) / band_flux(300.0, rect, D, 0, 1)
    expected = planck_spectral_radiance(10.0, 400.0) / planck_spectral_radiance(10.0, 300.0)
    assert ratio == pytest.approx(expected, rel=0.01)


def test_band_flux_disjoint_support_is_zero():
    S = constant_curve(SpectralGrid.uniform(6.0, 7.0, 0.01))
    D = constant_curve(SpectralGrid.uniform(12.0, 14.0, 0.01))
    assert band_flux(400.0, S, D, 5.0, 2.0) == 5.0


@settings(max_examples=30, deadline=None)
@given(st.floats(250, 700), st.floats(1, 100), st.integers(0, 2**32 - 1))
def test_band_flux_monotone_in_temperature(t, dt, seed):
    g = SpectralGrid.uniform(6.0, 16.0, 0.1)
    rng = np.random.default_rng(seed)
    S = SpectralCurve(g, rng.uniform(0, 1, len(g)))
    D = constant_curve(g)
    assert band_flux(t + dt, S, D, 0, 1) > band_flux(t, S, D, 0, 1)


def test_band_integral_vectorised_matches_scalar():
    g = default_grid()
    S = constant_curve(g, 0.5)
    temps = np.array([[300.0, 350.0], [400.0, 450.0]])
    vec = band_integral(temps, S, S)
    for idx in np.ndindex(temps.shape):
        assert vec[idx] == pytest.approx(band_integral(temps[idx], S, S), rel=1e-14)


def test_grid_refinement_convergence():
    from lwirms.plasmonics import default_filters, transmission_curve
    from lwirms.sensor import DetectorModel, detector_responsivity

    det = DetectorModel.build()
    spec = default_filters()[1]
    fluxes = []
    for step in (0.01, 0.005):
        g = SpectralGrid.uniform(6.0, 16.0, step)
        S, D = transmission_curve(spec, g), detector_responsivity(det, g)
        fluxes.append(band_flux(Temperature.from_celsius(150), S, D, 0.0, det.n1))
    assert abs(fluxes[1] - fluxes[0]) / fluxes[0] < 1e-3


def test_curve_csv_round_trip(tmp_path):
    g = SpectralGrid.uniform(8.0, 9.0, 0.25)
    curve = SpectralCurve(g, [0.0, 0.1, 0.2, 0.3, 0.123456789012345])
    path = tmp_path / "c.csv"
    write_curve_csv(curve, path)
    text = path.read_bytes()
    assert text.startswith(b"wavelength_um,value\n") and b"\r" not in text
    back = read_curve_csv(path)
    assert np.array_equal(back.values, curve.values)
    assert back.grid == g


def test_curve_csv_bad_header(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("lambda,v\n8,0.1\n9,0.2\n")
    with pytest.raises(DomainError):
        read_curve_csv(path)
