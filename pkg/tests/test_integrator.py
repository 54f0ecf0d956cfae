import math

import numpy as np
import pytest

from lambdasim import (
    ConfigError,
    ConvergenceError,
    FieldSlice,
    GridSpec,
    IntegratorSettings,
    PhysParams,
    ResolutionError,
    coupling_at_entry,
    field_derivative,
    flux_deviation,
    integrate_atoms,
    probe_at_entry,
    propagate,
)
from lambdasim.integrator import fine_time_axis


def _slice(t, wp, wc, z=0.0):
    return FieldSlice(z=z, omega_p_tau=np.broadcast_to(np.asarray(wp, complex), t.shape).copy(),
                      omega_c_tau=np.broadcast_to(np.asarray(wc, complex), t.shape).copy())


def test_zero_fields_keep_ground_state():
    t = np.linspace(-6, 6, 1201)
    out = integrate_atoms(_slice(t, 0.0, 0.0), t, PhysParams())
    assert np.all(out.a1 == 1.0) and np.all(out.a2 == 0) and np.all(out.a3 == 0)


def test_no_probe_keeps_ground_state():
    p = PhysParams()
    t = np.linspace(-6, 6, 4801)
    out = integrate_atoms(_slice(t, 0.0, coupling_at_entry(t, p)), t, p)
    assert np.max(np.abs(out.a1 - 1.0)) == 0.0
    assert np.max(np.abs(out.a3)) == 0.0


def test_two_level_rabi_oscillation():
    # A1 = cos(W t), A2 = i sin(W t) for a constant probe and no coupling
    w = 3.0
    t = np.linspace(0.0, 4.0, 4001)
    out = integrate_atoms(_slice(t, w, 0.0), t, PhysParams())
    assert np.max(np.abs(out.a1 - np.cos(w * t))) < 1e-10
    assert np.max(np.abs(out.a2 - 1j * np.sin(w * t))) < 1e-10
    assert np.max(np.abs(out.a3)) == 0.0


def test_detuned_two_level_matches_analytic():
    # generalised Rabi frequency sqrt(W^2 + d^2/4) for A1(0)=1
    w, d = 2.0, 1.5
    p = PhysParams(delta_tau=d)
    t = np.linspace(0.0, 3.0, 6001)
    out = integrate_atoms(_slice(t, w, 0.0), t, p)
    g = math.sqrt(w * w + d * d / 4)
    a2 = 1j * w / g * np.sin(g * t) * np.exp(0.5j * d * t)
    assert np.max(np.abs(out.a2 - a2)) < 1e-9


def test_decay_gives_monotone_norm():
    p = PhysParams(gamma2_tau=0.5)
    t = np.linspace(-6, 6, 4801)
    out = integrate_atoms(_slice(t, probe_at_entry(t, p), coupling_at_entry(t, p)), t, p)
    norm = out.norm()
    assert np.all(np.diff(norm) <= 1e-15)
    assert norm[-1] < 1.0


def test_resolution_guard():
    t = np.linspace(-6, 6, 121)
    with pytest.raises(ResolutionError, match="dt"):
        integrate_atoms(_slice(t, 5.0, 20.0), t, PhysParams())


def test_settings_validation():
    with pytest.raises(ConfigError, match="z_scheme"):
        IntegratorSettings(z_scheme="euler")
    with pytest.raises(ConfigError, match="time_scheme"):
        IntegratorSettings(time_scheme="rk45")
    with pytest.raises(ConfigError, match="substeps"):
        IntegratorSettings(substeps=0)
    with pytest.raises(ConfigError, match="norm_tolerance"):
        IntegratorSettings(norm_tolerance=0.0)


def test_field_derivative_signs():
    p = PhysParams()
    t = np.zeros(1)
    sl = FieldSlice(z=0.0, omega_p_tau=t + 1, omega_c_tau=t + 1,
                    a1=np.array([0.6 + 0j]), a2=np.array([0.0 + 0.1j]), a3=np.array([-0.8 + 0j]))
    dp, dc = field_derivative(sl, p)
    assert dp[0] == pytest.approx(1j * 200 * 0.6 * 0.1j)
    assert dc[0] == pytest.approx(1j * 200 * -0.8 * 0.1j)
    transparent = FieldSlice(z=0.0, omega_p_tau=t + 1, omega_c_tau=t + 1,
                             a1=np.array([0.6 + 0j]), a2=np.array([0j]), a3=np.array([-0.8 + 0j]))
    assert all(np.all(d == 0) for d in field_derivative(transparent, p))


def test_flux_derivative_small(params):
    # d/dz(|Op|^2 + |Oc|^2) = -kappa d|A2|^2/dt once the atomic equations are substituted
    t = fine_time_axis(GridSpec(), IntegratorSettings())
    sl = integrate_atoms(_slice(t, probe_at_entry(t, params), coupling_at_entry(t, params)), t, params)
    dp, dc = field_derivative(sl, params)
    rate = 2 * np.real(sl.omega_p_tau * dp + sl.omega_c_tau * dc)
    expected = -params.kappa12_tau * np.gradient(np.abs(sl.a2) ** 2, t)
    assert np.max(np.abs(rate - expected)) < 1e-4 * np.max(np.abs(rate))
    flux = np.abs(sl.omega_p_tau) ** 2 + np.abs(sl.omega_c_tau) ** 2
    assert np.max(np.abs(rate)) / np.max(flux) < 1e-3


def test_time_convergence_fourth_order():
    p = PhysParams(omega_c0_tau=5.0, omega_p0_tau=2.0, recur_ratio=0.0)
    ends = []
    for n in (1201, 2401, 4801):
        t = np.linspace(-6, 6, n)
        out = integrate_atoms(_slice(t, probe_at_entry(t, p), coupling_at_entry(t, p)), t, p)
        ends.append(np.array([out.a1[-1], out.a2[-1], out.a3[-1]]))
    e1 = np.max(np.abs(ends[0] - ends[1]))
    e2 = np.max(np.abs(ends[1] - ends[2]))
    assert math.log2(e1 / e2) == pytest.approx(4.0, abs=0.3)


@pytest.mark.parametrize("scheme", ["heun", "midpoint"])
def test_depth_convergence_second_order(scheme):
    # dz must be small enough for the explicit march to be stable
    p = PhysParams(omega_c0_tau=5.0, omega_p0_tau=2.0, recur_ratio=0.0, z_max=0.05)
    s = IntegratorSettings(z_scheme=scheme, substeps=16)
    exits = []
    for nz in (21, 41, 81):
        sol = propagate(p, GridSpec(t_max=6.0, n_t=601, n_z=nz), s)
        exits.append(sol.omega_p_tau[-1])
    e1 = np.max(np.abs(exits[0] - exits[1]))
    e2 = np.max(np.abs(exits[1] - exits[2]))
    assert math.log2(e1 / e2) == pytest.approx(2.0, abs=0.3)


def test_entry_face_bit_exact(numeric, grid, params):
    t = grid.t_axis()
    assert np.array_equal(numeric.t, t)
    assert np.array_equal(numeric.omega_p_tau[0], probe_at_entry(t, params))
    assert np.array_equal(numeric.omega_c_tau[0], coupling_at_entry(t, params))


def test_norm_conserved(numeric):
    assert numeric.norm_residual() <= 1e-7
    assert numeric.info["norm_residual_fine"] <= 1e-7


def test_flux_nearly_constant(numeric):
    assert flux_deviation(numeric) <= 1e-2


def test_decoupled_medium():
    p = PhysParams(kappa12_tau=1e-300, kappa32_tau=1e-300, recur_ratio=0.0, z_max=1.0)
    g = GridSpec(t_max=6.0, n_t=601, n_z=5)
    sol = propagate(p, g)
    for k in range(1, len(sol)):
        assert np.array_equal(sol.omega_p_tau[k], sol.omega_p_tau[0])
        assert np.array_equal(sol.a3[k], sol.a3[0])


def test_convergence_error_names_location():
    p = PhysParams(recur_ratio=0.0, z_max=0.1)
    g = GridSpec(t_max=6.0, n_t=1201, n_z=3)
    with pytest.raises(ConvergenceError, match=r"z=.*t="):
        propagate(p, g, IntegratorSettings(substeps=8, norm_tolerance=1e-15))


def test_decay_skips_norm_check():
    p = PhysParams(recur_ratio=0.0, z_max=0.1, gamma2_tau=1.0)
    g = GridSpec(t_max=6.0, n_t=1201, n_z=3)
    sol = propagate(p, g, IntegratorSettings(substeps=4))
    assert sol.norm_residual() > 1e-3


def test_coarse_grid_rejected():
    with pytest.raises(ResolutionError):
        propagate(PhysParams(), GridSpec(n_t=221), IntegratorSettings(substeps=1))
