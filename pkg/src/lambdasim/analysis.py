"""Diagnostics comparing the two engines and checking storage/regeneration claims."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .adiabatic import (
    RecurrenceMarkers,
    predict_peak_depth,
    predicted_fwhm,
    recurrence_markers,
    solve_adiabatic,
)
from .errors import ApplicabilityError, MeasurementError, OutOfRangeError
from .integrator import IntegratorSettings, propagate
from .model import GridSpec, PhysParams, SolutionGrid, recurrence_onset

#: Relative errors are only meaningful where the probe is not vacuum.
SIGNIFICANT_PROBE = 0.1

QUANTITIES = ("abs_a3", "probe", "coupling", "a1", "a2")

#: Relative tolerance for matching a measured width to the estimate.
FWHM_TOLERANCE = 0.15


def flux_deviation(sol: SolutionGrid) -> float:
    """``max_z max_t |F(z,t) - F(0,t)| / max_t F(0,t)`` for the scaled flux."""
    f = sol.flux()
    return float(np.max(np.abs(f - f[0])) / np.max(f[0]))


# ---------------------------------------------------------------------------
# Pulse widths
# ---------------------------------------------------------------------------

def _crossing(t, y, i0, i1, level):
    # linear interpolation between samples i0 (above) and i1 (below level)
    y0, y1 = y[i0], y[i1]
    return t[i0] + (level - y0) * (t[i1] - t[i0]) / (y1 - y0)


def pulse_fwhm(t, y) -> float:
    """Full width at half maximum of the main peak of ``y(t)``.

    Walks outwards from the maximum to the first half-maximum crossing on each
    side and interpolates linearly between grid points.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    peak = y[i]
    if not peak > 0:
        raise MeasurementError("no positive peak in window")
    half = 0.5 * peak
    below = np.nonzero(y[:i] < half)[0]
    if below.size == 0:
        raise MeasurementError("leading half-maximum crossing lies outside the window")
    j = below[-1]
    left = _crossing(t, y, j + 1, j, half)
    below = np.nonzero(y[i:] < half)[0]
    if below.size == 0:
        raise MeasurementError("trailing half-maximum crossing lies outside the window")
    j = i + below[0]
    right = _crossing(t, y, j - 1, j, half)
    return float(right - left)


def measure_fwhm(sol: SolutionGrid, z: float, window: Tuple[float, float]) -> Tuple[float, float]:
    """Amplitude and intensity FWHM of the probe at depth ``z`` inside ``window``."""
    k = sol.z_index(z)
    lo, hi = window
    mask = (sol.t >= lo) & (sol.t <= hi)
    if mask.sum() < 3:
        raise MeasurementError(f"window {window} holds fewer than three samples")
    t = sol.t[mask]
    amp = np.abs(sol.omega_p_tau[k, mask])
    return pulse_fwhm(t, amp), pulse_fwhm(t, amp ** 2)


def identify_fwhm(amplitude: Optional[float], intensity: Optional[float], predicted: float,
                  tolerance: float = FWHM_TOLERANCE) -> str:
    """Which width definition lies within ``tolerance`` of ``predicted``.

    Returns ``"amplitude"``, ``"intensity"``, ``"both"`` or ``"neither"``.
    """
    def close(w):
        return w is not None and abs(w / predicted - 1.0) <= tolerance

    amp, inten = close(amplitude), close(intensity)
    if amp and inten:
        return "both"
    return "amplitude" if amp else "intensity" if inten else "neither"


def regenerated_window(sol: SolutionGrid, z: float) -> Tuple[float, float]:
    """Time window holding the regenerated pulse at depth ``z``.

    Starts at the probe minimum between ``t = 2`` and one tau after the
    recurring coupling pulse starts to rise, and runs to the end of the grid.
    """
    p = sol.params
    if not p.has_recurrence:
        raise ApplicabilityError("no recurring coupling pulse")
    k = sol.z_index(z)
    gap = (sol.t >= 2.0) & (sol.t <= max(2.0, recurrence_onset(p)) + 1.0)
    if not np.any(gap):
        raise MeasurementError("grid does not cover the interval between the coupling pulses")
    i = np.nonzero(gap)[0][np.argmin(np.abs(sol.omega_p_tau[k, gap]))]
    return float(sol.t[i]), float(sol.t[-1])


def regenerated_peak_time(sol: SolutionGrid, z: float) -> float:
    lo, hi = regenerated_window(sol, z)
    k = sol.z_index(z)
    mask = (sol.t >= lo) & (sol.t <= hi)
    return float(sol.t[mask][np.argmax(np.abs(sol.omega_p_tau[k, mask]))])


# ---------------------------------------------------------------------------
# Storage diagnostics
# ---------------------------------------------------------------------------

def default_query_time(p: PhysParams) -> float:
    """Midpoint between ``t = 5`` and the recurrence centre."""
    return 0.5 * (5.0 + p.recur_center)


def photon_accounting(sol: SolutionGrid, t_q: Optional[float] = None) -> Tuple[float, float]:
    """Probe flux lost in the cell and |3> population left behind, at time ``t_q``.

    ``absorbed = int^{t_q} (|Op(0,t)|^2 - |Op(z_max,t)|^2) dt`` and
    ``stored = kappa12 tau int_0^{z_max} |A3(z, t_q)|^2 dz``, both in the
    scaled flux units.
    """
    p = sol.params
    t_q = default_query_time(p) if t_q is None else t_q
    if not sol.t[0] <= t_q <= sol.t[-1]:
        raise OutOfRangeError(f"t_q={t_q} outside grid [{sol.t[0]}, {sol.t[-1]}]")
    iq = sol.t_index(t_q)
    t = sol.t[: iq + 1]
    lost = np.abs(sol.omega_p_tau[0, : iq + 1]) ** 2 - np.abs(sol.omega_p_tau[-1, : iq + 1]) ** 2
    absorbed = float(trapezoid(lost, t))
    stored = float(p.kappa12_tau * trapezoid(np.abs(sol.a3[:, iq]) ** 2, sol.z))
    return absorbed, stored


def peak_coherence(sol: SolutionGrid, t_end: Optional[float] = None):
    """Largest ``|A3|`` before the recurrence: ``(value, z, t)``.

    ``t_end`` defaults to the rise of the recurring coupling pulse.
    """
    t_end = recurrence_onset(sol.params) if t_end is None else t_end
    mask = sol.t <= t_end
    a3 = np.abs(sol.a3[:, mask])
    iz, it = np.unravel_index(int(np.argmax(a3)), a3.shape)
    return float(a3[iz, it]), float(sol.z[iz]), float(sol.t[mask][it])


def late_time_ratio(sol: SolutionGrid, z: float, t_lo: float = 2.5, t_hi: float = 5.0) -> float:
    """Mean of ``|Op| / |Oc|`` at depth ``z`` over ``t_lo <= t <= t_hi``."""
    k = sol.z_index(z)
    mask = (sol.t >= t_lo) & (sol.t <= t_hi)
    return float(np.mean(np.abs(sol.omega_p_tau[k, mask]) / np.abs(sol.omega_c_tau[k, mask])))


def dark_interval(p: PhysParams) -> Tuple[float, float]:
    """Interval with neither coupling pulse on, per the entry-face envelopes.

    Starts where the probe has been absorbed (``t = 2``) and ends one tau
    before the recurring pulse rises to 1e-3 of its peak.
    """
    return 2.0, recurrence_onset(p) - 1.0


# ---------------------------------------------------------------------------
# Engine comparison
# ---------------------------------------------------------------------------

@dataclass
class ComparisonReport:
    max_abs_probe_error: float
    rel_error_where_significant: float
    rel_error_rms_significant: float
    significant_threshold: float
    flux_deviation: float
    flux_deviation_adiabatic: float
    norm_residual: float
    measured_fwhm_amplitude: Optional[float]
    measured_fwhm_intensity: Optional[float]
    predicted_fwhm: Optional[float]
    fwhm_identification: Optional[str]
    markers: Optional[RecurrenceMarkers]
    peak_depth_measured: float
    peak_depth_predicted: float
    peak_a3_measured: float

    def as_dict(self) -> dict:
        d = asdict(self)
        d["markers"] = None if self.markers is None else self.markers.as_dict()
        return d


def probe_errors(numeric: SolutionGrid, adiabatic: SolutionGrid, threshold: float = SIGNIFICANT_PROBE):
    """``(max abs error, max rel error, rms rel error)`` of the probe envelope.

    Relative errors use the adiabatic envelope as reference and only points
    where its magnitude exceeds ``threshold``.
    """
    diff = np.abs(numeric.omega_p_tau - adiabatic.omega_p_tau)
    ref = np.abs(adiabatic.omega_p_tau)
    sig = ref > threshold
    if not np.any(sig):
        return float(diff.max()), 0.0, 0.0
    rel = diff[sig] / ref[sig]
    return float(diff.max()), float(rel.max()), float(np.sqrt(np.mean(rel ** 2)))


def compare_engines(p: PhysParams, g: GridSpec, s: IntegratorSettings = IntegratorSettings(),
                    numeric: Optional[SolutionGrid] = None,
                    adiabatic: Optional[SolutionGrid] = None) -> ComparisonReport:
    """Run both engines on the same grid and collect the comparison metrics.

    Pre-computed solutions may be passed in to avoid re-running an engine.
    """
    if p.delta_tau != 0 or p.gamma2_tau != 0 or not p.equal_kappa:
        raise ApplicabilityError("engine comparison needs delta = gamma2 = 0 and kappa12 = kappa32")
    numeric = propagate(p, g, s) if numeric is None else numeric
    adiabatic = solve_adiabatic(p, g) if adiabatic is None else adiabatic
    max_abs, rel_max, rel_rms = probe_errors(numeric, adiabatic)

    fwhm_amp = fwhm_int = fwhm_pred = ident = None
    markers = None
    if p.has_recurrence:
        fwhm_pred = predicted_fwhm(p)
        markers = recurrence_markers(p, p.z_max, g)
        try:
            fwhm_amp, fwhm_int = measure_fwhm(numeric, p.z_max, regenerated_window(numeric, p.z_max))
        except MeasurementError:
            pass
        ident = identify_fwhm(fwhm_amp, fwhm_int, fwhm_pred)
    peak, z_peak, _ = peak_coherence(numeric)
    return ComparisonReport(
        max_abs_probe_error=max_abs,
        rel_error_where_significant=rel_max,
        rel_error_rms_significant=rel_rms,
        significant_threshold=SIGNIFICANT_PROBE,
        flux_deviation=flux_deviation(numeric),
        flux_deviation_adiabatic=flux_deviation(adiabatic),
        norm_residual=numeric.norm_residual(),
        measured_fwhm_amplitude=fwhm_amp,
        measured_fwhm_intensity=fwhm_int,
        predicted_fwhm=fwhm_pred,
        fwhm_identification=ident,
        markers=markers,
        peak_depth_measured=z_peak,
        peak_depth_predicted=predict_peak_depth(p),
        peak_a3_measured=peak,
    )


def extract_grids(sol: SolutionGrid, quantity: str):
    """``(t_axis, z_axis, values)`` with ``values[k, i]`` at ``(z[k], t[i])``.

    Quantities are magnitudes: ``abs_a3``, ``probe`` (|Op tau|),
    ``coupling`` (|Oc tau|), ``a1`` and ``a2``.
    """
    source = {
        "abs_a3": sol.a3,
        "probe": sol.omega_p_tau,
        "coupling": sol.omega_c_tau,
        "a1": sol.a1,
        "a2": sol.a2,
    }
    if quantity not in source:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    return sol.t.copy(), sol.z.copy(), np.abs(source[quantity])
