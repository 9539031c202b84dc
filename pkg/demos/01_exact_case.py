"""Transfer in the exactly solvable pulse pair.

With sine/cosine pulses (n=1), a delay of half a pulse length and equal
peak amplitudes, the mixing angle turns at a constant rate.  The
first-order formula is then exact, which makes this case a good check on
the integrator.
"""
# %%
import numpy as np

from stirap import PulseConfig, n3_first_order, n3_ode, propagate
from stirap.pulses import field_span

# %% [markdown]
# Sweep the pulse area and compare the closed form with direct integration.

# %%
for omega in (5.0, 10.0, 20.0, 40.0):
    cfg = PulseConfig(n=1, tau=1.0, t_d=0.5, omega_p0=omega, omega_s0=omega)
    formula = n3_first_order(cfg).n3
    ode = n3_ode(cfg).n3
    print(f"Omega0*tau = {omega:5.1f}   formula {formula:.10f}   integrator {ode:.10f}   diff {abs(formula - ode):.1e}")

# %% [markdown]
# Population history for Omega0*tau = 20.  The norm stays at one because
# there is no decay.

# %%
cfg = PulseConfig(n=1, tau=1.0, t_d=0.5, omega_p0=20.0, omega_s0=20.0)
traj = propagate(cfg, *field_span(cfg))
pops = traj.populations()
for k in range(0, len(traj.times), len(traj.times) // 8):
    n1, n2, n3 = pops[k]
    print(f"t = {traj.times[k]:+.3f}   n1 {n1:.4f}   n2 {n2:.4f}   n3 {n3:.4f}")
print("max norm drift:", float(np.max(np.abs(pops.sum(axis=1) - 1.0))))
