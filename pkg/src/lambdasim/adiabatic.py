"""Closed-form adiabatic engine.

In the adiabatic limit the atoms follow the dark superposition of |1> and |3>
and, for equal propagation constants, the normalised envelopes

    W_p = Omega_p* / Omega,    W_c = Omega_c* / Omega

obey pure advection in the characteristic coordinates

    v(t) = int_{t_min}^t Omega(0, t')^2 dt',    u(z) = kappa12 * z,

so ``W(z, t) = F(v(t) - u(z))`` with ``F`` tabulated once at the entry face.
The generalised Rabi frequency ``Omega(z, t) = Omega(0, t)`` is itself
depth independent, which fixes the field magnitudes.

The second half of the module contains the recurrence analysis for a delayed
second coupling pulse: the closed-form approximation to ``v`` during the
recurrence, the three exit-time markers of the regenerated pulse, its peak
amplitude, the matched recurrence ratio and the width estimate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from .errors import ApplicabilityError, OutOfRangeError, QuadratureError
from .model import (
    PLATEAU_FRACTION,
    GridSpec,
    PhysParams,
    SolutionGrid,
    coupling_at_entry,
    entry_intensity,
    probe_at_entry,
    total_rabi_at_entry,
)
from .special import erf

SQRT_5PI_2 = math.sqrt(5 * math.pi / 2)
SQRT_PI_2 = math.sqrt(math.pi / 2)

#: Largest ``|Omega_p|^2 / |Omega_c|^2`` at the entry face accepted as a weak probe.
WEAK_PROBE_RATIO = 0.1

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class QuadratureSettings:
    t_min: float = -6.0
    epsabs: float = 1e-10
    epsrel: float = 1e-12
    limit: int = 400


def _intensity_scalar(t: float, p: PhysParams) -> float:
    c = math.exp(-0.2 * t * t)
    if p.recur_ratio > 0:
        c += p.recur_ratio * math.exp(-0.2 * (t - p.recur_center) ** 2)
    return (p.omega_c0_tau * c) ** 2 + (p.omega_p0_tau * math.exp(-t * t)) ** 2


def _quad(a: float, b: float, p: PhysParams, q: QuadratureSettings) -> float:
    if b <= a:
        return 0.0
    kwargs = dict(args=(p,), epsabs=q.epsabs, epsrel=q.epsrel, limit=q.limit, full_output=1)
    if math.isfinite(b):
        centers = [0.0] + ([p.recur_center] if p.has_recurrence else [])
        # breakpoints hugging an endpoint give degenerate subintervals
        points = [c for c in centers if a + 1e-8 < c < b - 1e-8]
        if points:
            kwargs["points"] = points
    res = integrate.quad(_intensity_scalar, a, b, **kwargs)
    value, abserr = res[0], res[1]
    if len(res) > 3:
        raise QuadratureError(
            f"v integral on [{a}, {b}] did not converge (achieved abserr={abserr:.3g}): {res[3]}"
        )
    return value


def v_of_t(t: float, p: PhysParams, q: QuadratureSettings = QuadratureSettings()) -> float:
    """Integrated entry intensity ``int_{t_min}^t (|Omega_c tau|^2 + |Omega_p tau|^2) dt'``.

    Evaluated by adaptive quadrature of the exact entry profiles, cross term
    between the two coupling pulses included. ``t`` may be ``inf``.
    """
    if t < q.t_min:
        raise OutOfRangeError(f"t={t} lies before t_min={q.t_min}")
    if math.isfinite(t):
        return _quad(q.t_min, t, p, q)
    split = max(q.t_min, (p.recur_center if p.has_recurrence else 0.0) + 8.0)
    return _quad(q.t_min, split, p, q) + _quad(split, math.inf, p, q)


def first_pass_area(p: PhysParams) -> float:
    """``S``: the integrated intensity of the first coupling pulse plus the probe."""
    return p.omega_c0_tau ** 2 * SQRT_5PI_2 + p.omega_p0_tau ** 2 * SQRT_PI_2


def v_recurrence_approx(t, p: PhysParams):
    """Closed-form ``v`` during the recurring coupling pulse.

    ``S + (R^2/2) |Omega_c0 tau|^2 sqrt(5 pi/2) (1 + erf(sqrt(2/5) (t - t_d)))``;
    neglects the overlap of the two coupling pulses and assumes the first
    pass is complete.
    """
    t = np.asarray(t, dtype=float)
    rise = 1.0 + erf(math.sqrt(0.4) * (t - p.recur_center))
    return first_pass_area(p) + 0.5 * p.recur_ratio ** 2 * p.omega_c0_tau ** 2 * SQRT_5PI_2 * rise


def u_of_z(z, p: PhysParams):
    """Integrated depth coordinate ``kappa12 tau z`` for a uniform medium."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise OutOfRangeError("depth must be >= 0")
    return p.kappa12_tau * z


# ---------------------------------------------------------------------------
# Characteristic table
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CharacteristicTable:
    """Entry-face tabulation of ``W_p`` and ``W_c`` against ``v``.

    ``t_samples`` is a refinement of the output time grid; ``dt`` is the
    spacing of the output grid, used for the finite-difference ``A2``.
    Samples where the entry fields vanish carry the last defined ``W`` values.
    """

    params: PhysParams
    t_samples: np.ndarray
    v_samples: np.ndarray
    dv_samples: np.ndarray
    wp_samples: np.ndarray
    wc_samples: np.ndarray
    defined: np.ndarray
    v_infinity: float
    dt: float

    @property
    def t_min(self) -> float:
        return float(self.t_samples[0])

    @property
    def t_max(self) -> float:
        return float(self.t_samples[-1])

    def _interval(self, t):
        k = np.searchsorted(self.t_samples, t, side="right") - 1
        return np.clip(k, 0, self.t_samples.size - 2)

    def _hermite(self, k, s):
        h = self.t_samples[k + 1] - self.t_samples[k]
        v0, v1 = self.v_samples[k], self.v_samples[k + 1]
        m0, m1 = self.dv_samples[k] * h, self.dv_samples[k + 1] * h
        s2, s3 = s * s, s * s * s
        val = (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * v1 + (s3 - s2) * m1
        der = (6 * s2 - 6 * s) * v0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * v1 + (3 * s2 - 2 * s) * m1
        return val, der

    def v_at(self, t):
        """``v(t)`` by cubic Hermite interpolation (exact derivative ``Omega^2``)."""
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t_min - 1e-12) or np.any(t > self.t_max + 1e-12):
            raise OutOfRangeError(f"t outside tabulated window [{self.t_min}, {self.t_max}]")
        k = self._interval(t)
        h = self.t_samples[k + 1] - self.t_samples[k]
        s = np.clip((t - self.t_samples[k]) / h, 0.0, 1.0)
        return self._hermite(k, s)[0]

    def invert(self, target, iterations: int = 40):
        """Vectorised inverse of :meth:`v_at`: smallest ``t`` with ``v(t) >= target``."""
        target = np.asarray(target, dtype=float)
        flat = target.ravel()
        out = np.full(flat.shape, self.t_min)
        k = np.searchsorted(self.v_samples, flat, side="left")
        inside = (k > 0) & (k < self.v_samples.size)
        at_end = k >= self.v_samples.size
        out[at_end] = self.t_max
        k = k[inside] - 1
        goal = flat[inside]
        lo = np.zeros_like(goal)
        hi = np.ones_like(goal)
        span = self.v_samples[k + 1] - self.v_samples[k]
        s = np.where(span > 0, (goal - self.v_samples[k]) / np.where(span > 0, span, 1.0), 0.0)
        for _ in range(iterations):
            val, der = self._hermite(k, s)
            f = val - goal
            lo = np.where(f < 0, s, lo)
            hi = np.where(f >= 0, s, hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = s - f / der
            bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
            s_new = np.where(bad, 0.5 * (lo + hi), step)
            if np.all(np.abs(s_new - s) < 1e-15):
                s = s_new
                break
            s = s_new
        h = self.t_samples[k + 1] - self.t_samples[k]
        out[inside] = self.t_samples[k] + s * h
        return out.reshape(target.shape)

    def w_at(self, t):
        """``(W_p, W_c)`` at entry-face time ``t``; frozen where the fields vanish."""
        t = np.asarray(t, dtype=float)
        om = total_rabi_at_entry(t, self.params)
        live = om >= PLATEAU_FRACTION * self.params.omega_c0_tau
        safe = np.where(live, om, 1.0)
        wp = np.real(np.conj(probe_at_entry(t, self.params))) / safe
        wc = np.real(np.conj(coupling_at_entry(t, self.params))) / safe
        if not np.all(live):
            # last defined tabulated value at or before t
            k = np.clip(np.searchsorted(self.t_samples, t, side="right") - 1, 0, self.t_samples.size - 1)
            wp = np.where(live, wp, self.wp_samples[k])
            wc = np.where(live, wc, self.wc_samples[k])
        return wp, wc


def _composite_gauss(t: np.ndarray, p: PhysParams) -> np.ndarray:
    """Integral of the entry intensity over each interval of ``t`` (8-point Gauss-Legendre)."""
    a, b = t[:-1], t[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    return half * (entry_intensity(nodes, p) @ _GL_WEIGHTS)


def build_characteristic_table(p: PhysParams, g: GridSpec, refine: int = 8) -> CharacteristicTable:
    """Tabulate ``F_p``, ``F_c`` against ``v`` at the entry face."""
    t = np.linspace(g.t_min, g.t_max, (g.n_t - 1) * refine + 1)
    v = np.concatenate(([0.0], np.cumsum(_composite_gauss(t, p))))
    dv = entry_intensity(t, p)
    om = np.sqrt(dv)
    defined = om >= PLATEAU_FRACTION * p.omega_c0_tau
    if not np.any(defined):
        raise ApplicabilityError("entry fields vanish on the whole grid; nothing to tabulate")
    safe = np.where(defined, om, 1.0)
    wp = np.where(defined, np.real(probe_at_entry(t, p)) / safe, np.nan)
    wc = np.where(defined, np.real(coupling_at_entry(t, p)) / safe, np.nan)
    idx = np.where(defined, np.arange(t.size), 0)
    np.maximum.accumulate(idx, out=idx)
    first = int(np.argmax(defined))
    idx[:first] = first
    return CharacteristicTable(
        params=p,
        t_samples=t,
        v_samples=v,
        dv_samples=dv,
        wp_samples=wp[idx],
        wc_samples=wc[idx],
        defined=defined,
        v_infinity=float(v[-1]),
        dt=g.dt,
    )


def invert_v(table: CharacteristicTable, target: float) -> float:
    """Smallest time with ``v(t) >= target``.

    Bisection on the tabulation brackets the root, which is then refined
    against the adaptive-quadrature ``v`` anchored at the bracketing node.
    """
    tol = 1e-9 * max(1.0, table.v_infinity)
    if not (-tol <= target <= table.v_infinity + tol):
        raise OutOfRangeError(f"target {target} outside [0, {table.v_infinity}]")
    vs = table.v_samples
    k = int(np.searchsorted(vs, target, side="left"))
    if k == 0:
        return table.t_min
    if k >= vs.size:
        return table.t_max
    a, b = table.t_samples[k - 1], table.t_samples[k]
    q = QuadratureSettings(t_min=a)
    base = vs[k - 1]

    def residual(t):
        return base + _quad(a, t, table.params, q) - target

    fa, fb = residual(a), residual(b)
    if fa >= 0:
        return float(a)
    if fb <= 0:
        return float(b)
    return float(optimize.brentq(residual, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps))


# ---------------------------------------------------------------------------
# Fields and atoms
# ---------------------------------------------------------------------------

def _check_regime(p: PhysParams) -> None:
    if abs(p.delta_tau) >= p.omega_c0_tau:
        raise ApplicabilityError(
            f"|delta_tau|={abs(p.delta_tau)} must be < omega_c0_tau={p.omega_c0_tau}"
        )
    if p.delta_tau != 0 or p.gamma2_tau != 0:
        warnings.warn(
            "the adiabatic engine ignores delta_tau and gamma2_tau; "
            "use the numeric engine for detuned or decaying systems",
            stacklevel=3,
        )


def _weak_probe(table: CharacteristicTable) -> bool:
    p = table.params
    t = table.t_samples
    ratio = np.abs(probe_at_entry(t, p)) ** 2 / np.maximum(np.abs(coupling_at_entry(t, p)) ** 2, 1e-300)
    return bool(np.max(ratio) <= WEAK_PROBE_RATIO)


def _characteristic_w(z, t, table: CharacteristicTable):
    arg = table.v_at(t) - u_of_z(z, table.params)
    arg = np.minimum(arg, table.v_infinity)
    # characteristics entering before the pulses carry the t_min state
    tp = np.where(arg > 0, table.invert(np.maximum(arg, 0.0)), table.t_min)
    return table.w_at(tp)


def _fields_from_w(t, wp, wc, p: PhysParams, table: CharacteristicTable):
    om = total_rabi_at_entry(t, p)
    omp = (om * np.conj(wp)).astype(complex)
    if p.equal_kappa:
        return omp, (om * np.conj(wc)).astype(complex)
    if not _weak_probe(table):
        raise ApplicabilityError(
            "kappa12 != kappa32 needs |Omega_p|^2 << |Omega_c|^2 "
            f"(max ratio <= {WEAK_PROBE_RATIO}) at the entry face"
        )
    return omp, coupling_at_entry(t, p)


def fields_at(z, t, p: PhysParams, table: CharacteristicTable):
    """``(Omega_p tau, Omega_c tau)`` at depth ``z`` and time ``t`` (broadcasting).

    For equal propagation constants the travelling-wave solution is exact;
    otherwise a weak probe is required and the coupling propagates unchanged.
    """
    z, t = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(t, dtype=float))
    wp, wc = _characteristic_w(z, t, table)
    return _fields_from_w(t, wp, wc, p, table)


def _dark_pair(z, t, p: PhysParams, table: CharacteristicTable):
    """Return ``(A1, A3, Omega_p, Omega_c)`` of the dark state."""
    wp, wc = _characteristic_w(z, t, table)
    omp, omc = _fields_from_w(t, wp, wc, p, table)
    if p.equal_kappa:
        return wc.astype(complex), -wp.astype(complex), omp, omc
    om = np.sqrt(np.abs(omp) ** 2 + np.abs(omc) ** 2)
    live = om >= PLATEAU_FRACTION * p.omega_c0_tau
    safe = np.where(live, om, 1.0)
    a1 = np.where(live, np.conj(omc) / safe, wc)
    a3 = np.where(live, -np.conj(omp) / safe, -wp)
    return a1.astype(complex), a3.astype(complex), omp, omc


def _a2_from(da1, da3, omp, omc, p: PhysParams):
    use_p = np.abs(omp) >= np.abs(omc)
    denom = np.where(use_p, omp, omc)
    num = np.where(use_p, da1, da3)
    live = np.abs(denom) >= PLATEAU_FRACTION * p.omega_c0_tau
    safe = np.where(live, denom, 1.0)
    return np.where(live, -1j * num / safe, 0.0)


def atomic_state_adiabatic(z, t, p: PhysParams, table: CharacteristicTable, dt: Optional[float] = None):
    """Adiabatic amplitudes ``(A1, A2, A3)`` at ``(z, t)``.

    ``A1 = Omega_c*/Omega`` and ``A3 = -Omega_p*/Omega``; ``A2`` follows from
    ``A2 = -(i/Omega_p) dA1/dt = -(i/Omega_c) dA3/dt`` with a centred
    difference of step ``dt`` (one-sided at the window edges), using whichever
    field is larger as the divisor.
    """
    dt = table.dt if dt is None else dt
    z, t = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(t, dtype=float))
    a1, a3, omp, omc = _dark_pair(z, t, p, table)
    lo = np.maximum(t - dt, table.t_min)
    hi = np.minimum(t + dt, table.t_max)
    a1_lo, a3_lo, _, _ = _dark_pair(z, lo, p, table)
    a1_hi, a3_hi, _, _ = _dark_pair(z, hi, p, table)
    width = hi - lo
    a2 = _a2_from((a1_hi - a1_lo) / width, (a3_hi - a3_lo) / width, omp, omc, p)
    return a1, a2, a3


def solve_adiabatic(p: PhysParams, g: GridSpec, table: Optional[CharacteristicTable] = None) -> SolutionGrid:
    """Evaluate the adiabatic solution on the full ``(z, t)`` grid."""
    _check_regime(p)
    g.check_support(p)
    if table is None:
        table = build_characteristic_table(p, g)
    t = g.t_axis()
    z = g.z_axis(p.z_max)
    zz, tt = np.meshgrid(z, t, indexing="ij")
    a1, a3, omp, omc = _dark_pair(zz, tt, p, table)
    da1 = np.gradient(a1, g.dt, axis=1, edge_order=1)
    da3 = np.gradient(a3, g.dt, axis=1, edge_order=1)
    a2 = _a2_from(da1, da3, omp, omc, p)
    return SolutionGrid(
        engine="adiabatic",
        params=p,
        grid=g,
        z=z,
        t=t,
        omega_p_tau=omp,
        omega_c_tau=omc,
        a1=a1,
        a2=a2,
        a3=a3,
        info={"v_infinity": table.v_infinity},
    )


# ---------------------------------------------------------------------------
# Storage depth and recurrence analysis
# ---------------------------------------------------------------------------

def predict_peak_depth(p: PhysParams) -> float:
    """Depth (cm) at which the left-behind ``|A3|`` equals its entry-face maximum.

    Solves ``2 kappa12 tau z = S``.
    """
    return first_pass_area(p) / (2.0 * p.kappa12_tau)


@dataclass(frozen=True)
class RecurrenceMarkers:
    """Onset, peak and completion times of the regenerated pulse at ``z_m``.

    A marker is ``None`` when its defining equation has no solution in the
    search window. ``first_pass`` flags an onset condition already met during
    the first coupling pulse (``u(z_m) < S``).
    """

    z_m: float
    t_r1: Optional[float]
    t_rm: Optional[float]
    t_r2: Optional[float]
    first_pass: bool

    def as_dict(self) -> dict:
        return {
            "z_m": self.z_m,
            "t_r1": self.t_r1,
            "t_rm": self.t_rm,
            "t_r2": self.t_r2,
            "first_pass": self.first_pass,
        }


def recurrence_markers(p: PhysParams, z_m: float, g: GridSpec = GridSpec(), xtol: float = 1e-6) -> RecurrenceMarkers:
    """Solve ``v(t) - kappa12 tau z_m = 0, S/2, S`` by bisection on the quadrature ``v``."""
    q = QuadratureSettings(t_min=g.t_min)
    u = float(u_of_z(z_m, p))
    s = first_pass_area(p)
    v_end = v_of_t(g.t_max, p, q)

    def solve(target):
        if target <= 0:
            return g.t_min
        if target > v_end:
            return None
        return float(optimize.bisect(lambda t: v_of_t(t, p, q) - target, g.t_min, g.t_max, xtol=xtol))

    return RecurrenceMarkers(
        z_m=float(z_m),
        t_r1=solve(u),
        t_rm=solve(u + 0.5 * s),
        t_r2=solve(u + s),
        first_pass=u < s,
    )


def regenerated_peak(p: PhysParams, z_m: float, markers: RecurrenceMarkers) -> complex:
    """Probe ``Omega_p tau`` at ``(z_m, t_rm)`` predicted from the recurring coupling pulse."""
    if markers.t_rm is None:
        raise ApplicabilityError(f"no peak marker at z_m={z_m}: recurrence too weak")
    ratio = p.omega_p0_tau / math.hypot(p.omega_c0_tau, p.omega_p0_tau)
    envelope = math.exp(-((markers.t_rm - p.recur_center) ** 2) / 5.0)
    return complex(p.recur_ratio * p.omega_c0_tau * envelope * ratio)


def matched_R(p: PhysParams, z_m: float) -> float:
    """Recurrence ratio that reproduces the entry-face peak argument at ``t = t_d``.

    Solves ``|Omega_p0 tau|^2 sqrt(pi/8) + |Omega_c0 tau|^2 sqrt(5 pi/8) (1 + R^2)
    = kappa12 tau z_m`` for ``R >= 0``.
    """
    lhs0 = p.omega_p0_tau ** 2 * math.sqrt(math.pi / 8)
    unit = p.omega_c0_tau ** 2 * math.sqrt(5 * math.pi / 8)
    r2 = (p.kappa12_tau * z_m - lhs0) / unit - 1.0
    if r2 < -1e-12:
        raise ApplicabilityError(
            f"cell too short: kappa12*z_m={p.kappa12_tau * z_m:.6g} < {lhs0 + unit:.6g}"
        )
    return math.sqrt(max(r2, 0.0))


def predicted_fwhm(p: PhysParams) -> float:
    """Width estimate (units of tau) of the regenerated pulse."""
    if not p.has_recurrence:
        raise ApplicabilityError("width estimate needs recur_ratio > 0")
    ratio2 = (p.omega_p0_tau / p.omega_c0_tau) ** 2
    return SQRT_5PI_2 / p.recur_ratio ** 2 * (1.0 + ratio2 / math.sqrt(5.0))
