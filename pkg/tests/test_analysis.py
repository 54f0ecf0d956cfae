import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambdasim import (
    ApplicabilityError,
    ComparisonReport,
    GridSpec,
    MeasurementError,
    OutOfRangeError,
    PhysParams,
    compare_engines,
    dark_interval,
    extract_grids,
    late_time_ratio,
    measure_fwhm,
    peak_coherence,
    photon_accounting,
    propagate,
    pulse_fwhm,
    regenerated_window,
    solve_adiabatic,
)
from lambdasim.analysis import default_query_time, identify_fwhm, probe_errors, regenerated_peak_time


def test_gaussian_widths():
    t = np.linspace(-6, 6, 12001)
    y = np.exp(-t * t)
    assert pulse_fwhm(t, y) == pytest.approx(2 * math.sqrt(math.log(2)), abs=1e-6)
    assert pulse_fwhm(t, y ** 2) == pytest.approx(math.sqrt(2 * math.log(2)), abs=1e-6)
    assert pulse_fwhm(t, y) == pytest.approx(1.665, abs=5e-4)


def test_triangle_width_exact():
    t = np.linspace(-2, 2, 9)
    y = np.maximum(0.0, 1 - np.abs(t) / 1.3)
    assert pulse_fwhm(t, y) == pytest.approx(1.3, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.2, max_value=3.0), st.floats(min_value=-2.0, max_value=2.0))
def test_width_tracks_gaussian_scale(w, c):
    t = np.linspace(-15, 15, 30001)
    y = np.exp(-(((t - c) / w) ** 2))
    assert pulse_fwhm(t, y) == pytest.approx(2 * w * math.sqrt(math.log(2)), rel=1e-4)


def test_width_errors():
    t = np.linspace(0, 1, 11)
    with pytest.raises(MeasurementError, match="no positive peak"):
        pulse_fwhm(t, np.zeros_like(t))
    with pytest.raises(MeasurementError, match="leading"):
        pulse_fwhm(t, np.exp(-t))
    with pytest.raises(MeasurementError, match="trailing"):
        pulse_fwhm(t, np.exp(t))


def test_entry_probe_width(numeric):
    amp, _ = measure_fwhm(numeric, 0.0, (-6.0, 6.0))
    assert amp == pytest.approx(1.665, abs=1e-3)
    with pytest.raises(MeasurementError):
        measure_fwhm(numeric, 0.0, (0.0, 0.015))


def test_regenerated_window(numeric, params):
    lo, hi = regenerated_window(numeric, 3.0)
    assert 2.0 <= lo <= 6.2 and hi == 16.0
    m_peak = regenerated_peak_time(numeric, 3.0)
    assert lo < m_peak < hi
    sol = solve_adiabatic(params.replace(recur_ratio=0.0, z_max=0.1), GridSpec(n_z=3))
    with pytest.raises(ApplicabilityError):
        regenerated_window(sol, 0.1)


def test_dark_interval(params):
    lo, hi = dark_interval(params)
    assert lo == 2.0
    assert hi == pytest.approx(11.0 - math.sqrt(5 * math.log(1000)) - 1.0)


def test_photon_accounting_default(numeric, params):
    assert default_query_time(params) == 8.0
    absorbed, stored = photon_accounting(numeric, 4.0)
    assert stored / absorbed == pytest.approx(1.0, abs=0.05)
    with pytest.raises(OutOfRangeError):
        photon_accounting(numeric, 20.0)


def test_photon_accounting_without_medium():
    p = PhysParams(kappa12_tau=1e-300, kappa32_tau=1e-300, recur_ratio=0.0, z_max=1.0)
    sol = propagate(p, GridSpec(t_max=6.0, n_t=601, n_z=3))
    absorbed, stored = photon_accounting(sol, 5.0)
    assert absorbed == 0.0
    assert stored < 1e-290


def test_peak_coherence_and_ratio(numeric):
    value, z, t = peak_coherence(numeric)
    assert value == pytest.approx(1 / math.sqrt(17), rel=0.02)
    assert t <= 11.0 - math.sqrt(5 * math.log(1000))
    assert late_time_ratio(numeric, 3.0) == pytest.approx(0.24, abs=0.02)


def test_extract_grids(adiabatic, grid, params):
    t, z, v = extract_grids(adiabatic, "abs_a3")
    assert np.array_equal(t, grid.t_axis()) and np.array_equal(z, grid.z_axis(params.z_max))
    assert v.shape == (z.size, t.size) and np.all(v >= 0)
    assert np.array_equal(extract_grids(adiabatic, "probe")[2], np.abs(adiabatic.omega_p_tau))
    with pytest.raises(ValueError, match="quantity"):
        extract_grids(adiabatic, "phase")


def test_ground_state_grid_without_probe():
    p = PhysParams(omega_p0_tau=1e-9, recur_ratio=0.0, z_max=1.0)
    sol = solve_adiabatic(p, GridSpec(t_max=10.0, n_t=801, n_z=11))
    assert np.allclose(extract_grids(sol, "a1")[2], 1.0, atol=1e-15)


def test_probe_errors_on_identical_grids(adiabatic):
    assert probe_errors(adiabatic, adiabatic) == (0.0, 0.0, 0.0)


def test_vacuum_comparison():
    p = PhysParams(kappa12_tau=1e-12, kappa32_tau=1e-12, recur_ratio=0.0, z_max=1.0)
    g = GridSpec(t_max=8.0, n_t=1401, n_z=5)
    report = compare_engines(p, g)
    assert report.max_abs_probe_error < 1e-9
    assert report.rel_error_where_significant < 1e-9
    assert report.markers is None and report.predicted_fwhm is None
    d = report.as_dict()
    assert set(d) == {f for f in ComparisonReport.__dataclass_fields__}
    json.dumps(d)


def test_comparison_requires_resonant_lossless(params, grid):
    with pytest.raises(ApplicabilityError):
        compare_engines(params.replace(gamma2_tau=0.1), grid)
    with pytest.raises(ApplicabilityError):
        compare_engines(params.replace(kappa32_tau=150.0), grid)


def test_comparison_report_default(numeric, adiabatic, params, grid):
    report = compare_engines(params, grid, numeric=numeric, adiabatic=adiabatic)
    assert report.significant_threshold == 0.1
    assert report.flux_deviation_adiabatic < 1e-12
    assert report.norm_residual < 1e-7
    assert report.markers.z_m == 3.0
    assert report.peak_depth_predicted == pytest.approx(2.8808, abs=1e-4)
    d = report.as_dict()
    assert all(v is not None for v in d.values())
    numbers = [v for v in d.values() if isinstance(v, float)]
    assert all(math.isfinite(v) and v >= 0 for v in numbers)
    assert d["fwhm_identification"] in ("amplitude", "intensity", "both", "neither")


def test_fwhm_identification():
    assert identify_fwhm(0.19, 0.14, 0.18) == "amplitude"
    assert identify_fwhm(1.0, 0.17, 0.18) == "intensity"
    assert identify_fwhm(0.18, 0.19, 0.18) == "both"
    assert identify_fwhm(1.09, 0.73, 0.18) == "neither"
    assert identify_fwhm(None, None, 0.18) == "neither"


def test_refinement_does_not_worsen_agreement(numeric, adiabatic, params):
    g = GridSpec(n_z=1201)
    fine = propagate(params, g)
    coarse_rel = probe_errors(numeric, adiabatic)[1]
    fine_rel = probe_errors(fine, solve_adiabatic(params, g))[1]
    assert fine_rel <= coarse_rel * 1.05
