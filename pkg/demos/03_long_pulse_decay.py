"""Transfer with a decaying intermediate level.

For long pulses the dark state leaks into the lossy excited level at a
slow rate.  The exponent splits into a switch-on transient and a
quasistationary integral.  The closed form applies to the exactly
solvable pulse pair.
"""
# %%
import math

from stirap import PulseConfig, n3_long, n3_long_closed, n3_ode

gamma = 40.0

# %%
for omega in (20.0, 40.0, 60.0, 120.0):
    cfg = PulseConfig(n=1, tau=1.0, t_d=0.5, omega_p0=omega, omega_s0=omega, gamma=gamma)
    ode = n3_ode(cfg).n3
    closed = n3_long_closed(omega, 1.0, gamma)
    quad = n3_long(cfg)
    bare = n3_long_closed(omega, 1.0, gamma, include_transient=False).n3
    print(f"Omega0*tau = {omega:5.1f}   ode {ode:.5f}   closed {closed.n3:.5f}   "
          f"quadrature {quad.n3:.5f}   no transient {bare:.5f}")
    print(f"    ln n3: ode {math.log(ode):+.4f}, closed {closed.diagnostics['exponent']:+.4f}; "
          f"transient share {closed.diagnostics['transient_share']:+.3f}")
    for w in closed.warnings:
        print("    warning:", w)

# %% [markdown]
# The formula tracks the integrator once the field dominates the decay rate.
# When Omega0 < gamma the expansion behind it no longer holds, and the
# warnings say so.
