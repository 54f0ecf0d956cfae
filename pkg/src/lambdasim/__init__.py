"""Probe/coupling pulse-pair propagation in a resonant three-level Lambda medium."""

from .adiabatic import (
    CharacteristicTable,
    QuadratureSettings,
    RecurrenceMarkers,
    atomic_state_adiabatic,
    build_characteristic_table,
    fields_at,
    first_pass_area,
    invert_v,
    matched_R,
    predict_peak_depth,
    predicted_fwhm,
    recurrence_markers,
    regenerated_peak,
    solve_adiabatic,
    u_of_z,
    v_of_t,
    v_recurrence_approx,
)
from .analysis import (
    ComparisonReport,
    compare_engines,
    dark_interval,
    extract_grids,
    flux_deviation,
    late_time_ratio,
    measure_fwhm,
    peak_coherence,
    photon_accounting,
    pulse_fwhm,
    regenerated_window,
)
from .config import RunConfig, parse_config, sweep_runs, to_manifest
from .errors import (
    ApplicabilityError,
    ConfigError,
    ConvergenceError,
    LambdaSimError,
    MeasurementError,
    OutOfRangeError,
    QuadratureError,
    ResolutionError,
)
from .integrator import IntegratorSettings, field_derivative, integrate_atoms, propagate
from .model import (
    FieldSlice,
    GridSpec,
    PhysParams,
    SolutionGrid,
    coupling_at_entry,
    entry_intensity,
    flux_F,
    probe_at_entry,
    total_rabi_at_entry,
)

__version__ = "0.1.0"
