# %% [markdown]
# # Storage and regeneration of a probe pulse
#
# A weak probe (peak 5/tau) and a strong coupling pulse (peak 20/tau) enter a
# Lambda medium with kappa*tau = 200 /cm. The probe is absorbed into the
# |1>-|3> coherence; a second coupling pulse, four times stronger and centred
# at t/tau = 11, reads it back out.
#
# Run with `python notebooks/01_storage_and_regeneration.py`. Figures are
# written next to this file when matplotlib is installed.

# %%
import math
from pathlib import Path

import numpy as np

from lambdasim import (
    GridSpec,
    PhysParams,
    flux_deviation,
    late_time_ratio,
    peak_coherence,
    photon_accounting,
    predict_peak_depth,
    propagate,
    solve_adiabatic,
)

p, g = PhysParams(), GridSpec()
numeric = propagate(p, g)
adiabatic = solve_adiabatic(p, g)

# %% [markdown]
# ## Stored coherence
#
# In the adiabatic picture the entry-face maximum |A3| = 1/sqrt(17) travels
# into the medium unchanged and is left behind at depth S/(2 kappa).

# %%
value, z_peak, t_peak = peak_coherence(numeric)
print(f"numeric  max|A3| = {value:.5f} at z = {z_peak:.3f} cm, t = {t_peak:.2f}")
print(f"expected max|A3| = {1 / math.sqrt(17):.5f} at z = {predict_peak_depth(p):.3f} cm")

# %%
for z in (0.5, 1.5, 2.5, 2.9):
    k = numeric.z_index(z)
    print(f"z = {z:4.1f} cm   stored |A3| at t = 5: {abs(numeric.a3[k, numeric.t_index(5.0)]):.4f}")

# %% [markdown]
# ## Field bookkeeping
#
# The scaled flux |Op|^2 + |Oc|^2 should not depend on depth, and the probe
# photons lost in the cell should all sit in state |3> once the first
# coupling pulse has gone.

# %%
print(f"flux deviation: numeric {flux_deviation(numeric):.2e}, adiabatic {flux_deviation(adiabatic):.2e}")
absorbed, stored = photon_accounting(numeric, 5.0)
print(f"absorbed {absorbed:.4f}, stored {stored:.4f}, ratio {stored / absorbed:.5f}")
print(f"late-time probe/coupling ratio at 3 cm: {late_time_ratio(numeric, 3.0):.4f}")

# %% [markdown]
# ## Exit probe
#
# At 3 cm the probe has a long asymmetric tail from the first pass and a
# regenerated pulse when the second coupling pulse arrives.

# %%
k = numeric.z_index(3.0)
for t in (0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 8.5, 9.0, 10.0):
    i = numeric.t_index(t)
    print(f"t = {t:4.1f}  |Op| numeric {abs(numeric.omega_p_tau[k, i]):8.4f}"
          f"   adiabatic {abs(adiabatic.omega_p_tau[k, i]):8.4f}")

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, sol in zip(axes, (adiabatic, numeric)):
        cs = ax.contourf(sol.t, sol.z, np.abs(sol.a3), levels=30)
        ax.set_title(f"|A3|, {sol.engine}")
        ax.set_xlabel("t / tau")
    axes[0].set_ylabel("z (cm)")
    fig.colorbar(cs, ax=axes)
    fig.savefig(Path(__file__).with_name("storage_a3.png"), dpi=120)
