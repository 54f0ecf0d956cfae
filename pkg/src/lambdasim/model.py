"""Dimensionless description of the three-level Lambda medium and its pulses.

Everything is expressed in units of the probe pulse length tau: times are
``t_r / tau``, Rabi frequencies are the products ``Omega * tau`` and the
propagation constants ``kappa * tau`` carry units of cm^-1 so that depth is
measured in cm.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields
from typing import Iterator, Optional

import numpy as np

from .errors import ConfigError

#: Below this fraction of ``omega_c0_tau`` the entry fields count as "off".
PLATEAU_FRACTION = 1e-12

#: Level of a Gaussian envelope (relative to its peak) that marks its edge.
PULSE_EDGE_LEVEL = 1e-3


@dataclass(frozen=True)
class PhysParams:
    """Physical parameters of the Lambda system and the entry pulses.

    Defaults are the parameters of the reference storage/regeneration run:
    probe 5, coupling 20, no decay, resonant, ``kappa*tau = 200 /cm``,
    a second coupling pulse four times stronger centred at ``t/tau = 11``.
    """

    omega_p0_tau: float = 5.0
    omega_c0_tau: float = 20.0
    gamma2_tau: float = 0.0
    delta_tau: float = 0.0
    kappa12_tau: float = 200.0
    kappa32_tau: float = 200.0
    recur_ratio: float = 4.0
    recur_center: float = 11.0
    z_max: float = 3.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{f.name}: expected a real number, got {value!r}")
            if not math.isfinite(value):
                raise ConfigError(f"{f.name}: must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        _positive = ("omega_p0_tau", "omega_c0_tau", "kappa12_tau", "kappa32_tau", "z_max")
        for name in _positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name}: must be > 0, got {getattr(self, name)!r}")
        for name in ("gamma2_tau", "recur_ratio"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name}: must be >= 0, got {getattr(self, name)!r}")
        if self.omega_c0_tau < 5:
            warnings.warn(
                f"omega_c0_tau={self.omega_c0_tau} is not >> 1; "
                "the adiabatic solution may be inaccurate",
                stacklevel=3,
            )

    @property
    def equal_kappa(self) -> bool:
        return math.isclose(self.kappa12_tau, self.kappa32_tau, rel_tol=1e-12)

    @property
    def has_recurrence(self) -> bool:
        return self.recur_ratio > 0

    def replace(self, **changes) -> "PhysParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return PhysParams(**values)


@dataclass(frozen=True)
class GridSpec:
    """Output sampling: ``n_t`` retarded times and ``n_z`` depths over ``[0, z_max]``."""

    t_min: float = -6.0
    t_max: float = 16.0
    n_t: int = 2201
    n_z: int = 601

    def __post_init__(self):
        for name in ("n_t", "n_z"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigError(f"{name}: expected an integer, got {value!r}")
            if value < 2:
                raise ConfigError(f"{name}: must be >= 2, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("t_min", "t_max"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{name}: expected a real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not self.t_min < self.t_max:
            raise ConfigError(f"t_min must be < t_max, got {self.t_min} >= {self.t_max}")

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.n_t - 1)

    def t_axis(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_t)

    def z_axis(self, z_max: float) -> np.ndarray:
        return np.linspace(0.0, z_max, self.n_z)

    def check_support(self, p: PhysParams) -> None:
        """Raise unless the window covers both entry pulses."""
        if self.t_min > -5.0:
            raise ConfigError(f"t_min: must be <= -5 to contain the entry pulses, got {self.t_min}")
        if p.has_recurrence and self.t_max < p.recur_center + 5.0:
            raise ConfigError(
                f"t_max: must be >= recur_center + 5 = {p.recur_center + 5.0} "
                f"when recur_ratio > 0, got {self.t_max}"
            )


# ---------------------------------------------------------------------------
# Entry-face envelopes
# ---------------------------------------------------------------------------

def probe_at_entry(t, p: PhysParams):
    """Probe half-Rabi frequency times tau at ``z = 0``: a unit-width Gaussian."""
    t = np.asarray(t, dtype=float)
    return (p.omega_p0_tau * np.exp(-t * t)).astype(complex)


def coupling_at_entry(t, p: PhysParams):
    """Coupling half-Rabi frequency times tau at ``z = 0``.

    A broad Gaussian centred at zero plus an optional recurrence of relative
    amplitude ``recur_ratio`` centred at ``recur_center``.
    """
    t = np.asarray(t, dtype=float)
    env = np.exp(-0.2 * t * t)
    if p.recur_ratio > 0:
        env = env + p.recur_ratio * np.exp(-0.2 * (t - p.recur_center) ** 2)
    return (p.omega_c0_tau * env).astype(complex)


def entry_intensity(t, p: PhysParams):
    """``|Omega_p tau|^2 + |Omega_c tau|^2`` at the entry face (real)."""
    return np.abs(probe_at_entry(t, p)) ** 2 + np.abs(coupling_at_entry(t, p)) ** 2


def total_rabi_at_entry(t, p: PhysParams):
    """Generalised Rabi frequency ``Omega(0, t) * tau``."""
    return np.sqrt(entry_intensity(t, p))


def flux_F(omega_p_tau, omega_c_tau, p: PhysParams):
    """Scaled photon flux ``|Omega_p tau|^2 + (kappa12/kappa32) |Omega_c tau|^2``.

    This is the flux sum divided by ``kappa12 * tau**2``; the constant factor
    does not affect its depth independence.
    """
    ratio = p.kappa12_tau / p.kappa32_tau
    return np.abs(omega_p_tau) ** 2 + ratio * np.abs(omega_c_tau) ** 2


def first_pulse_end(p: PhysParams, level: float = PULSE_EDGE_LEVEL) -> float:
    """Time at which the first coupling envelope has decayed to ``level`` of its peak."""
    return math.sqrt(-math.log(level) / 0.2)


def recurrence_onset(p: PhysParams, level: float = PULSE_EDGE_LEVEL) -> float:
    """Time at which the recurring coupling envelope rises to ``level`` of its peak.

    Returns ``inf`` when there is no second pulse.
    """
    if not p.has_recurrence:
        return math.inf
    return p.recur_center - math.sqrt(-math.log(level) / 0.2)


# ---------------------------------------------------------------------------
# Field/amplitude containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldSlice:
    """Envelopes and atomic amplitudes over the time grid at one depth ``z`` (cm).

    The amplitudes are ``None`` for a slice that only carries fields.
    """

    z: float
    omega_p_tau: np.ndarray
    omega_c_tau: np.ndarray
    a1: Optional[np.ndarray] = None
    a2: Optional[np.ndarray] = None
    a3: Optional[np.ndarray] = None

    @property
    def has_amplitudes(self) -> bool:
        return self.a1 is not None

    def norm(self) -> np.ndarray:
        return np.abs(self.a1) ** 2 + np.abs(self.a2) ** 2 + np.abs(self.a3) ** 2

    def norm_residual(self) -> float:
        return float(np.max(np.abs(1.0 - self.norm())))


@dataclass(frozen=True, eq=False)
class SolutionGrid:
    """Full ``(z, t)`` record of fields and amplitudes produced by one engine.

    Arrays have shape ``(n_z, n_t)``; row ``k`` is the slice at ``z[k]``.
    """

    engine: str
    params: PhysParams
    grid: GridSpec
    z: np.ndarray
    t: np.ndarray
    omega_p_tau: np.ndarray
    omega_c_tau: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.engine not in ("adiabatic", "numeric"):
            raise ConfigError(f"engine: unknown tag {self.engine!r}")
        shape = (self.z.size, self.t.size)
        for name in ("omega_p_tau", "omega_c_tau", "a1", "a2", "a3"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if np.any(np.diff(self.z) <= 0):
            raise ValueError("slices must be strictly ordered in z")

    def __len__(self) -> int:
        return self.z.size

    def __getitem__(self, k: int) -> FieldSlice:
        return FieldSlice(
            z=float(self.z[k]),
            omega_p_tau=self.omega_p_tau[k],
            omega_c_tau=self.omega_c_tau[k],
            a1=self.a1[k],
            a2=self.a2[k],
            a3=self.a3[k],
        )

    def __iter__(self) -> Iterator[FieldSlice]:
        return (self[k] for k in range(len(self)))

    def z_index(self, z: float) -> int:
        """Index of the slice closest to depth ``z``."""
        return int(np.argmin(np.abs(self.z - z)))

    def t_index(self, t: float) -> int:
        return int(np.argmin(np.abs(self.t - t)))

    def norm_residual(self) -> float:
        norm = np.abs(self.a1) ** 2 + np.abs(self.a2) ** 2 + np.abs(self.a3) ** 2
        return float(np.max(np.abs(1.0 - norm)))

    def flux(self) -> np.ndarray:
        return flux_F(self.omega_p_tau, self.omega_c_tau, self.params)
