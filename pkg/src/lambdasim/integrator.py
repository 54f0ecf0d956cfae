"""Full numerical Maxwell-Bloch engine.

At each depth the atomic amplitudes are integrated over the whole retarded
time window with fixed-step RK4, starting from the ground state at ``t_min``.
The field envelopes are then advanced in depth with a second-order
predictor-corrector, re-solving the atoms for every trial field.

The atoms see the fields on an integration grid that refines the output time
grid ``substeps`` times; only the output samples are stored.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ConfigError, ConvergenceError, ResolutionError
from .model import FieldSlice, GridSpec, PhysParams, SolutionGrid, coupling_at_entry, probe_at_entry

log = logging.getLogger(__name__)

#: Upper bound on ``dt * max|Omega tau|`` for the RK4 sweep.
RESOLUTION_LIMIT = 0.1

Z_SCHEMES = ("heun", "midpoint")
TIME_SCHEMES = ("rk4",)


@dataclass(frozen=True)
class IntegratorSettings:
    time_scheme: str = "rk4"
    z_scheme: str = "heun"
    norm_tolerance: float = 1e-7
    substeps: int = 32

    def __post_init__(self):
        if self.time_scheme not in TIME_SCHEMES:
            raise ConfigError(f"time_scheme: must be one of {TIME_SCHEMES}, got {self.time_scheme!r}")
        if self.z_scheme not in Z_SCHEMES:
            raise ConfigError(f"z_scheme: must be one of {Z_SCHEMES}, got {self.z_scheme!r}")
        if not self.norm_tolerance > 0:
            raise ConfigError(f"norm_tolerance: must be > 0, got {self.norm_tolerance!r}")
        if isinstance(self.substeps, bool) or not isinstance(self.substeps, (int, np.integer)) or self.substeps < 1:
            raise ConfigError(f"substeps: must be an integer >= 1, got {self.substeps!r}")
        object.__setattr__(self, "substeps", int(self.substeps))


@numba.njit(cache=True)
def _rk4_sweep(h, wp, wc, delta, gamma2, x1, x2, x3):
    n = wp.shape[0]
    a1 = np.empty(n, np.complex128)
    a2 = np.empty(n, np.complex128)
    a3 = np.empty(n, np.complex128)
    a1[0] = x1
    a2[0] = x2
    a3[0] = x3
    d = 1j * (delta + 0.5j * gamma2)
    for k in range(n - 1):
        # 4-point midpoint interpolation keeps the sweep fourth order
        if k > 0 and k + 2 < n:
            pm = (-wp[k - 1] + 9.0 * wp[k] + 9.0 * wp[k + 1] - wp[k + 2]) / 16.0
            cm = (-wc[k - 1] + 9.0 * wc[k] + 9.0 * wc[k + 1] - wc[k + 2]) / 16.0
        else:
            pm = 0.5 * (wp[k] + wp[k + 1])
            cm = 0.5 * (wc[k] + wc[k + 1])
        p0 = wp[k]
        c0 = wc[k]
        p1 = wp[k + 1]
        c1 = wc[k + 1]

        k11 = 1j * p0 * x2
        k12 = 1j * (p0.conjugate() * x1 + c0.conjugate() * x3) + d * x2
        k13 = 1j * c0 * x2
        y1 = x1 + 0.5 * h * k11
        y2 = x2 + 0.5 * h * k12
        y3 = x3 + 0.5 * h * k13

        k21 = 1j * pm * y2
        k22 = 1j * (pm.conjugate() * y1 + cm.conjugate() * y3) + d * y2
        k23 = 1j * cm * y2
        y1 = x1 + 0.5 * h * k21
        y2 = x2 + 0.5 * h * k22
        y3 = x3 + 0.5 * h * k23

        k31 = 1j * pm * y2
        k32 = 1j * (pm.conjugate() * y1 + cm.conjugate() * y3) + d * y2
        k33 = 1j * cm * y2
        y1 = x1 + h * k31
        y2 = x2 + h * k32
        y3 = x3 + h * k33

        k41 = 1j * p1 * y2
        k42 = 1j * (p1.conjugate() * y1 + c1.conjugate() * y3) + d * y2
        k43 = 1j * c1 * y2

        x1 = x1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
        x2 = x2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
        x3 = x3 + h / 6.0 * (k13 + 2.0 * k23 + 2.0 * k33 + k43)
        a1[k + 1] = x1
        a2[k + 1] = x2
        a3[k + 1] = x3
    return a1, a2, a3


def check_resolution(dt: float, omega_p_tau, omega_c_tau) -> None:
    peak = float(np.sqrt(np.max(np.abs(omega_p_tau) ** 2 + np.abs(omega_c_tau) ** 2)))
    if dt * peak >= RESOLUTION_LIMIT:
        raise ResolutionError(
            f"time step {dt:.4g} too coarse: dt*max(Omega tau) = {dt * peak:.4g} >= {RESOLUTION_LIMIT}"
        )


def integrate_atoms(fields: FieldSlice, t: np.ndarray, p: PhysParams, s: IntegratorSettings = IntegratorSettings(),
                    initial=(1.0, 0.0, 0.0)) -> FieldSlice:
    """Integrate the three amplitude equations across the uniform grid ``t``.

    ``dA1/dt = i Op A2``, ``dA2/dt = i Op* A1 + i Oc* A3 + i(delta + i gamma2/2) A2``,
    ``dA3/dt = i Oc A2``, starting from ``initial`` at ``t[0]``.
    """
    t = np.asarray(t, dtype=float)
    dt = float(t[1] - t[0])
    wp = np.ascontiguousarray(fields.omega_p_tau, dtype=np.complex128)
    wc = np.ascontiguousarray(fields.omega_c_tau, dtype=np.complex128)
    if wp.shape != t.shape or wc.shape != t.shape:
        raise ValueError("fields must be sampled on the full time grid")
    check_resolution(dt, wp, wc)
    x1, x2, x3 = (complex(a) for a in initial)
    a1, a2, a3 = _rk4_sweep(dt, wp, wc, p.delta_tau, p.gamma2_tau, x1, x2, x3)
    return FieldSlice(z=fields.z, omega_p_tau=wp, omega_c_tau=wc, a1=a1, a2=a2, a3=a3)


def field_derivative(slice_: FieldSlice, p: PhysParams):
    """Depth derivatives of the conjugated envelopes.

    Returns ``(d Omega_p* tau / dz, d Omega_c* tau / dz) =
    (i kappa12 tau A1* A2, i kappa32 tau A3* A2)`` in cm^-1.
    """
    a2 = slice_.a2
    dp = 1j * p.kappa12_tau * np.conj(slice_.a1) * a2
    dc = 1j * p.kappa32_tau * np.conj(slice_.a3) * a2
    return dp, dc


def _envelope_rates(slice_: FieldSlice, p: PhysParams):
    dp, dc = field_derivative(slice_, p)
    return np.conj(dp), np.conj(dc)


def fine_time_axis(g: GridSpec, s: IntegratorSettings) -> np.ndarray:
    """Integration grid; every ``substeps``-th point is an output sample, bit for bit."""
    t = np.linspace(g.t_min, g.t_max, (g.n_t - 1) * s.substeps + 1)
    t[:: s.substeps] = g.t_axis()
    return t


def propagate(p: PhysParams, g: GridSpec, s: IntegratorSettings = IntegratorSettings(),
              check_norm: bool = True) -> SolutionGrid:
    """March the coupled atom/field equations from the entry face to ``z_max``.

    Raises :class:`ConvergenceError` when ``gamma2_tau == 0`` and the norm
    residual exceeds ``s.norm_tolerance`` anywhere on the integration grid.
    """
    g.check_support(p)
    t_fine = fine_time_axis(g, s)
    stride = s.substeps
    z = g.z_axis(p.z_max)
    dz = float(z[1] - z[0])
    check = check_norm and p.gamma2_tau == 0

    shape = (g.n_z, g.n_t)
    out = {name: np.empty(shape, np.complex128) for name in ("omega_p_tau", "omega_c_tau", "a1", "a2", "a3")}
    worst = 0.0

    def solve(zk, wp, wc):
        return integrate_atoms(FieldSlice(z=zk, omega_p_tau=wp, omega_c_tau=wc), t_fine, p, s)

    def record(k, sl):
        nonlocal worst
        residual = np.abs(1.0 - sl.norm())
        i = int(np.argmax(residual))
        worst = max(worst, float(residual[i]))
        if check and residual[i] > s.norm_tolerance:
            raise ConvergenceError(
                f"norm residual {residual[i]:.3g} > {s.norm_tolerance:.3g} "
                f"at z={sl.z:.6g} cm, t={t_fine[i]:.6g}"
            )
        out["omega_p_tau"][k] = sl.omega_p_tau[::stride]
        out["omega_c_tau"][k] = sl.omega_c_tau[::stride]
        out["a1"][k] = sl.a1[::stride]
        out["a2"][k] = sl.a2[::stride]
        out["a3"][k] = sl.a3[::stride]

    # entry fields are stored exactly as sampled
    cur = solve(0.0, probe_at_entry(t_fine, p), coupling_at_entry(t_fine, p))
    record(0, cur)
    for k in range(1, g.n_z):
        wp, wc = cur.omega_p_tau, cur.omega_c_tau
        rp0, rc0 = _envelope_rates(cur, p)
        if s.z_scheme == "heun":
            trial = solve(z[k], wp + dz * rp0, wc + dz * rc0)
            rp1, rc1 = _envelope_rates(trial, p)
            wp_new = wp + 0.5 * dz * (rp0 + rp1)
            wc_new = wc + 0.5 * dz * (rc0 + rc1)
        else:
            trial = solve(z[k - 1] + 0.5 * dz, wp + 0.5 * dz * rp0, wc + 0.5 * dz * rc0)
            rph, rch = _envelope_rates(trial, p)
            wp_new = wp + dz * rph
            wc_new = wc + dz * rch
        cur = solve(z[k], wp_new, wc_new)
        record(k, cur)
    log.debug("propagate: %d slices, max norm residual %.3g", g.n_z, worst)

    return SolutionGrid(
        engine="numeric",
        params=p,
        grid=g,
        z=z,
        t=g.t_axis(),
        info={"norm_residual_fine": worst, "substeps": s.substeps, "z_scheme": s.z_scheme},
        **out,
    )
