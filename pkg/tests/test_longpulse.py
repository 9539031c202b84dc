import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from stirap.errors import PreconditionViolated, ResonanceSingularity
from stirap.longpulse import (
    LongPulseTerms,
    TransientParams,
    hd2_transient,
    hd_quasistationary,
    long_pulse_terms,
    n3_long,
    n3_long_closed,
    n3_long_closed_for,
)
from stirap.pulses import MixingFrame, PulseConfig, interaction_window


def exact(omega=20.0, gamma=40.0):
    return PulseConfig(n=1, tau=1.0, t_d=0.5, omega_p0=omega, omega_s0=omega, gamma=gamma)


def frozen_rate(omega, alpha, gamma, t):
    """Log-rate of the dark amplitude for frozen Omega and theta_dot, from a matrix exponential."""
    h = np.array([[0, omega / 2, 1j * alpha], [omega / 2, -0.5j * gamma, 0], [-1j * alpha, 0, 0]])
    c = expm(-1j * h * t) @ np.array([0.0, 0.0, 1.0])
    return (-alpha * c[0] / c[2]).real


@pytest.mark.parametrize("omega, gamma", [(60.0, 40.0), (10.0, 40.0), (25.0, 10.0)])
@pytest.mark.parametrize("t", [0.01, 0.1, 0.4])
def test_transient_matches_frozen_linear_system(omega, gamma, t):
    alpha = 1e-3
    got = alpha**2 * hd2_transient(TransientParams(omega, 1.0, gamma, t))
    assert got == pytest.approx(frozen_rate(omega, alpha, gamma, t), rel=1e-5)


def test_transient_limits():
    p = TransientParams(30.0, math.pi, 40.0, 0.0)
    assert hd2_transient(p) == pytest.approx(0.0, abs=1e-15)
    far = TransientParams(50.0, math.pi, 40.0, 50.0)
    assert hd2_transient(far) == pytest.approx(-2 * 40.0 * math.pi**2 / 2500.0, rel=1e-12)


def test_transient_critical_damping_is_continuous():
    with pytest.warns(ResonanceSingularity):
        mid = hd2_transient(TransientParams(20.0, 1.0, 40.0, 0.1))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        above = hd2_transient(TransientParams(20.0 + 1e-6, 1.0, 40.0, 0.1))
        below = hd2_transient(TransientParams(20.0 - 1e-6, 1.0, 40.0, 0.1))
    assert mid == pytest.approx(above, rel=1e-6)
    assert mid == pytest.approx(below, rel=1e-6)


def test_transient_params_validation():
    with pytest.raises(ValueError):
        TransientParams(0.0, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        TransientParams(1.0, 1.0, 1.0, -0.1)


def _frame(theta_dot, omega, theta_ddot=0.0, omega_dot=0.0):
    return MixingFrame(t=0.0, theta=0.3, theta_dot=theta_dot, theta_ddot=theta_ddot, omega=omega,
                       omega_dot=omega_dot, omega_tilde=math.hypot(omega, 2 * theta_dot))


def test_quasistationary_terms():
    assert hd_quasistationary(_frame(0.0, 5.0, 3.0, 2.0), 10.0) == (0.0, 0.0)
    h1, h2 = hd_quasistationary(_frame(math.pi, 20.0), 40.0)
    assert h1 == pytest.approx(-0.2 * math.pi**2, rel=1e-14)
    assert h2 == 0.0


def test_terms_bundle():
    cfg = exact()
    win = interaction_window(cfg)
    # omega = gamma/2 here: critically damped
    with pytest.warns(ResonanceSingularity):
        terms = long_pulse_terms(cfg, win.t_i)
    assert isinstance(terms, LongPulseTerms)
    assert terms.h_d2_transient == pytest.approx(0.0, abs=1e-14)
    assert terms.h_d1_quasi == pytest.approx(-0.2 * math.pi**2, rel=1e-12)


def test_closed_form_values():
    res = n3_long_closed(20.0, 1.0, 40.0)
    assert res.n3 == pytest.approx(math.exp(0.06 * math.pi**2 - 0.2 * math.pi**2), rel=1e-14)
    assert res.n3 == pytest.approx(0.2512, abs=1e-4)
    bare = n3_long_closed(20.0, 1.0, 40.0, include_transient=False)
    assert bare.n3 == pytest.approx(0.1389, abs=1e-4)
    assert bare.method == "long-closed-no-transient"


def test_closed_form_small_gamma_limit():
    res = n3_long_closed(20.0, 1.0, 1e-9)
    assert res.diagnostics["exponent"] == pytest.approx(-8 * math.pi**2 / 400, rel=1e-6)
    assert res.warnings


@pytest.mark.parametrize("gamma", [20.0, 40.0, 100.0])
def test_quadrature_matches_closed_form(gamma):
    cfg = exact(30.0, gamma)
    assert n3_long(cfg).n3 == pytest.approx(n3_long_closed_for(cfg).n3, abs=1e-10)


def test_exponent_split():
    res = n3_long(exact())
    parts = res.diagnostics["parts"]
    assert set(parts) == {"transient", "first_integral", "second_integral"}
    assert sum(parts.values()) == pytest.approx(res.diagnostics["exponent"])
    assert parts["second_integral"] == pytest.approx(0.0, abs=1e-12)


def test_smooth_switch_on_has_no_transient():
    cfg = PulseConfig(n=2, tau=1.0, t_d=0.5, omega_p0=40.0, omega_s0=40.0, gamma=20.0)
    res = n3_long(cfg)
    assert res.diagnostics["parts"]["transient"] == 0.0
    assert res.diagnostics["alpha"] == 0.0


def test_gamma_gate():
    with pytest.raises(PreconditionViolated, match="below 5"):
        n3_long(exact(gamma=4.0))
    forced = n3_long(exact(gamma=4.0), force=True)
    assert forced.warnings
    assert any("10" in w for w in n3_long(exact(gamma=8.0)).warnings)
    assert not n3_long(exact(omega=60.0, gamma=40.0)).warnings
    assert any("exceed 1" in w for w in n3_long(exact(omega=20.0, gamma=40.0)).warnings)


def test_closed_form_needs_exact_case():
    with pytest.raises(PreconditionViolated):
        n3_long_closed_for(PulseConfig(n=2, omega_p0=20.0, omega_s0=20.0, gamma=40.0))


def test_overflow_outside_validity():
    assert n3_long_closed(0.5, 1.0, 100.0).n3 == math.inf


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 3), omega=st.floats(20.0, 200.0), ratio=st.floats(0.5, 2.0), gamma_frac=st.floats(0.05, 1.0))
def test_long_formula_bounded_when_field_dominates(n, omega, ratio, gamma_frac):
    wp, ws = omega, omega * ratio
    gamma = max(5.0, gamma_frac * min(wp, ws))
    cfg = PulseConfig(n=n, tau=1.0, t_d=0.5, omega_p0=wp, omega_s0=ws, gamma=gamma)
    if min(wp, ws) < gamma:
        return
    res = n3_long(cfg, force=True)
    assert 0.0 < res.n3 <= 1.0
