# %% [markdown]
# # How adiabatic is the reference run?
#
# The closed-form engine assumes the atoms follow the dark state exactly. The
# numeric engine keeps the bright-state admixture, which is of order
# 1/(Omega tau). Scaling both Rabi frequencies by s and kappa by s^2 keeps
# the characteristic geometry fixed and isolates that correction.

# %%
import warnings

from lambdasim import GridSpec, PhysParams, compare_engines, flux_deviation, propagate

print(" scale   max abs/scale   max rel   rms rel")
for s in (1.0, 2.0):
    p = PhysParams(omega_p0_tau=5 * s, omega_c0_tau=20 * s, kappa12_tau=200 * s * s, kappa32_tau=200 * s * s)
    g = GridSpec(n_z=int(600 * s * s) + 1)
    r = compare_engines(p, g)
    print(f"{s:6.1f}   {r.max_abs_probe_error / s:12.4f}   {r.rel_error_where_significant:7.3f}"
          f"   {r.rel_error_rms_significant:7.4f}")

# %% [markdown]
# ## Weak coupling
#
# With Oc0 tau of order one the flux is no longer depth independent and the
# engines part ways. These numbers are diagnostics, not checks.

# %%
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    for oc in (1.0, 2.0):
        p = PhysParams(omega_c0_tau=oc, omega_p0_tau=oc / 4)
        g = GridSpec()
        sol = propagate(p, g)
        print(f"Oc0 tau = {oc}: numeric flux deviation {flux_deviation(sol):.3e}")
        if oc == 2.0:
            r = compare_engines(p, g, numeric=sol)
            print(f"  max rel probe error {r.rel_error_where_significant:.3f}, rms {r.rel_error_rms_significant:.3f}")
