"""Reference values computed without the package's integrators or formulas."""
import math

import numpy as np
from scipy.linalg import expm


def exact_case_n3(omega0: float, tau: float = 1.0, gamma: float = 0.0) -> float:
    """n3 at Stokes switch-off for n=1, t_d=tau/2, equal amplitudes.

    In the rotating bright/excited/dark frame the Hamiltonian is constant
    (Omega = omega0, mixing-angle rate pi/tau) over the window of length
    tau/2, so the propagator is a single matrix exponential.  Before the
    window only the Stokes field is on and level 1 is untouched; at its
    start the dark state is level 1 and at its end it is (minus) level 3.
    """
    rate = math.pi / tau
    h = np.array([[0, omega0 / 2, 1j * rate], [omega0 / 2, -0.5j * gamma, 0], [-1j * rate, 0, 0]])
    c = expm(-1j * h * (tau / 2)) @ np.array([0.0, 0.0, 1.0])
    return float(abs(c[2]) ** 2)


def exact_case_first_order(omega0: float, tau: float = 1.0) -> float:
    """First-order formula written out for constant Omega and theta_dot."""
    a = math.pi / tau
    wt2 = omega0**2 + 4 * a * a
    phi = 0.5 * math.sqrt(wt2) * tau / 2
    return (omega0**2 + 4 * a * a * math.cos(phi)) ** 2 / wt2**2
