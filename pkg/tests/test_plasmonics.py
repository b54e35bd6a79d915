import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lwirms.errors import DomainError, NoBoundModeError
from lwirms.plasmonics import (
    GALLIUM_ARSENIDE,
    GERMANIUM,
    MATERIALS,
    SILICA,
    DielectricMaterial,
    FilterSpec,
    get_material,
    load_materials,
    lorentzian,
    measure_fwhm,
    pitch_for_wavelength,
    spp_wavelength_approx,
    spp_wavelength_exact,
    sweep_center_vs_pitch,
    transmission_curve,
)
from lwirms.spectral import SpectralCurve, SpectralGrid

SQRT3 = math.sqrt(3.0)


def test_catalog_indices():
    assert MATERIALS["ge"].n_d == 4.0
    assert MATERIALS["gaas"].n_d == 3.3
    assert MATERIALS["sio2"].n_d == 1.47
    with pytest.raises(DomainError):
        DielectricMaterial("air", 1.0)


def test_catalog_override(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps([{"name": "BaF2", "n_d": 1.45}, {"name": "ge", "n_d": 4.01}]))
    cat = load_materials(path)
    assert get_material("baf2", cat).n_d == 1.45
    assert cat["ge"].n_d == 4.01
    assert MATERIALS["ge"].n_d == 4.0
    with pytest.raises(DomainError, match="unknown dielectric"):
        get_material("unobtainium", cat)


def test_exact_high_permittivity_limit():
    spec = FilterSpec(3.0, GERMANIUM)
    # 6*sqrt(3) * sqrt(1e6 / (1e6 - 16)) evaluated independently
    expected = 6 * SQRT3 * math.sqrt(1e6 / (1e6 - 16))
    assert expected == pytest.approx(10.3924, abs=2e-4)
    assert spp_wavelength_exact(spec, -1e6) == pytest.approx(expected, rel=1e-12)


def test_exact_order_11():
    spec = FilterSpec(3.0, GERMANIUM, order=(1, 1))
    assert spp_wavelength_exact(spec, -1e6) == pytest.approx(6.0, abs=2e-4)


def test_exact_pole():
    spec = FilterSpec(3.0, GERMANIUM)
    near = spp_wavelength_exact(spec, -16.0001)
    assert math.isfinite(near) and near > 1000
    with pytest.raises(NoBoundModeError):
        spp_wavelength_exact(spec, -16.0)
    with pytest.raises(NoBoundModeError):
        spp_wavelength_exact(spec, 5.0)


def test_order_zero_rejected():
    with pytest.raises(DomainError):
        FilterSpec(3.0, GERMANIUM, order=(0, 0))
    with pytest.raises(DomainError):
        spp_wavelength_approx(3.0, GERMANIUM, (0, 0))


@pytest.mark.parametrize("pitch,expected", [(3.0, 10.3923), (2.5, 8.6603), (3.5, 12.1244)])
def test_approx_fabricated_pitches(pitch, expected):
    assert spp_wavelength_approx(pitch, GERMANIUM) == pytest.approx(expected, abs=1e-4)
    assert spp_wavelength_approx(pitch, GERMANIUM) == pytest.approx(SQRT3 * pitch * 4 / 2, rel=1e-15)


def test_approx_silica_below_lwir():
    center = spp_wavelength_approx(3.0, SILICA)
    assert center == pytest.approx(SQRT3 * 3.0 * 1.47 / 2, rel=1e-15)
    assert center == pytest.approx(3.8192, abs=1e-4)
    assert center < 8.0


@pytest.mark.parametrize("target,mat,expected", [
    (10.3923, GERMANIUM, 3.0000),
    (12.0, GERMANIUM, 3.4641),
    (10.0, GALLIUM_ARSENIDE, 3.4991),
])
def test_pitch_for_wavelength(target, mat, expected):
    assert pitch_for_wavelength(target, mat) == pytest.approx(expected, abs=1e-4)


@given(st.floats(1.0, 30.0), st.sampled_from(list(MATERIALS.values())))
def test_pitch_round_trip(target, mat):
    back = spp_wavelength_approx(pitch_for_wavelength(target, mat), mat)
    assert abs(back - target) / target <= 1e-12


@given(st.floats(0.5, 6.0), st.sampled_from([(1, 0), (1, 1), (2, 0), (2, 1)]),
       st.floats(1.1, 5.0), st.floats(1e5, 1e9))
def test_exact_converges_to_approx(pitch, order, n_d, ratio):
    mat = DielectricMaterial("x", n_d)
    spec = FilterSpec(pitch, mat, order=order)
    eps_m = -ratio * mat.permittivity
    exact = spp_wavelength_exact(spec, eps_m)
    approx = spp_wavelength_approx(pitch, mat, order)
    assert abs(exact - approx) / approx <= 1e-4


def test_transmission_default_line_shape():
    spec = FilterSpec(3.0, GERMANIUM)
    c = spec.center_um
    vals = lorentzian([c, c - 0.675, c + 0.675], c, spec.fwhm_um, spec.peak_transmission)
    assert vals[0] == pytest.approx(0.60, abs=1e-12)
    assert vals[1] == pytest.approx(0.30, abs=1e-9)
    assert vals[2] == pytest.approx(0.30, abs=1e-9)


def test_transmission_peak_one():
    spec = FilterSpec(3.0, GERMANIUM, peak_transmission=1.0, center_um_override=10.0)
    grid = SpectralGrid.uniform(6.0, 16.0, 0.01)
    curve = transmission_curve(spec, grid)
    assert curve.values.max() == pytest.approx(1.0, abs=1e-12)
    assert grid.wavelengths[np.argmax(curve.values)] == pytest.approx(10.0)


@pytest.mark.parametrize("kw", [{"peak_transmission": 0.0}, {"peak_transmission": 1.2},
                                {"fwhm_um": 0.0}, {"aspect_ratio": 1.0},
                                {"aspect_ratio": 0.0}])
def test_filter_spec_invariants(kw):
    with pytest.raises(DomainError):
        FilterSpec(3.0, GERMANIUM, **kw)
    with pytest.raises(DomainError):
        FilterSpec(-1.0, GERMANIUM)


def test_centers_increase_with_pitch():
    centers = [FilterSpec(p, GERMANIUM).center_um for p in (2.5, 3.0, 3.5)]
    assert centers[0] < centers[1] < centers[2]


def test_transmission_symmetric_and_bounded():
    spec = FilterSpec(3.0, GERMANIUM, center_um_override=11.0, peak_transmission=0.7)
    grid = SpectralGrid.uniform(8.0, 14.0, 0.01)
    vals = transmission_curve(spec, grid).values
    assert np.allclose(vals, vals[::-1], rtol=0, atol=1e-12)
    assert np.all(vals > 0) and np.all(vals <= 0.7)


def test_transmission_curve_override():
    grid = SpectralGrid.uniform(8.0, 14.0, 0.5)
    measured = SpectralCurve(grid, np.linspace(0, 0.5, len(grid)))
    spec = FilterSpec(3.0, GERMANIUM, curve=measured)
    fine = SpectralGrid.uniform(8.0, 14.0, 0.25)
    out = transmission_curve(spec, fine)
    assert np.allclose(out.values, np.interp(fine.wavelengths, grid.wavelengths, measured.values))


def test_measured_fwhm():
    grid = SpectralGrid.uniform(6.0, 16.0, 0.001)
    curve = transmission_curve(FilterSpec(3.0, GERMANIUM), grid)
    assert measure_fwhm(curve) == pytest.approx(1.35, abs=0.01)


def test_sweep_values_and_linearity():
    pairs = sweep_center_vs_pitch([2.0, 3.0, 4.0], GERMANIUM)
    centers = [c for _, c in pairs]
    assert centers == pytest.approx([6.928, 10.392, 13.856], abs=1e-3)
    assert centers[1] - centers[0] == pytest.approx(centers[2] - centers[1], rel=1e-14)
    assert sweep_center_vs_pitch([3.0], GERMANIUM) == [(3.0, spp_wavelength_approx(3.0, GERMANIUM))]
    with pytest.raises(DomainError):
        sweep_center_vs_pitch([], GERMANIUM)


def _slope(pairs):
    p, c = np.array(pairs).T
    return np.polyfit(p, c, 1)[0]


def test_slope_ratio_matches_index_ratio():
    pitches = np.linspace(2, 4, 9)
    ratio = _slope(sweep_center_vs_pitch(pitches, GERMANIUM)) / _slope(sweep_center_vs_pitch(pitches, SILICA))
    assert ratio == pytest.approx(4 / 1.47, rel=1e-12)
    assert ratio == pytest.approx(2.721, abs=1e-3)


@given(st.floats(1.1, 5.0))
def test_sweep_slope_equals_lattice_law(n_d):
    mat = DielectricMaterial("x", n_d)
    slope = _slope(sweep_center_vs_pitch(np.linspace(2, 4, 5), mat))
    assert slope == pytest.approx(SQRT3 * n_d / 2, rel=1e-12)
