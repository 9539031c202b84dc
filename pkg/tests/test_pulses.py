import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stirap.errors import ConfigError, DegenerateField
from stirap.pulses import (
    PulseConfig,
    adiabaticity,
    endpoint_frames,
    envelope,
    envelope_derivs,
    field_span,
    interaction_window,
    is_exact_case,
    mixing_frame,
    rabi_pair,
    rabi_scalar,
    switch_times,
    window_frame,
)

configs = st.builds(
    PulseConfig,
    n=st.integers(1, 8),
    tau=st.floats(0.2, 5.0),
    t_d=st.floats(0.05, 0.95),
    omega_p0=st.floats(0.5, 100.0),
    omega_s0=st.floats(0.5, 100.0),
    gamma=st.floats(0.0, 50.0),
).map(lambda c: c.replace(t_d=c.t_d * c.tau))


def exact(omega=20.0, tau=1.0, gamma=0.0):
    return PulseConfig(n=1, tau=tau, t_d=0.5 * tau, omega_p0=omega, omega_s0=omega, gamma=gamma)


@pytest.mark.parametrize(
    "kw, fragment",
    [
        (dict(omega_s0=0.0), "Stokes amplitude must be positive"),
        (dict(omega_p0=-1.0), "pump amplitude must be positive"),
        (dict(n=0), "envelope exponent"),
        (dict(n=9), "envelope exponent"),
        (dict(n=1.5), "integer"),
        (dict(tau=0.0), "tau must be positive"),
        (dict(t_d=0.0), "delay"),
        (dict(gamma=-1.0), "gamma"),
        (dict(gamma=math.nan), "finite"),
    ],
)
def test_config_validation(kw, fragment):
    base = dict(omega_p0=1.0, omega_s0=1.0)
    base.update(kw)
    with pytest.raises(ConfigError, match=fragment):
        PulseConfig(**base)


def test_config_is_frozen_and_replace():
    cfg = exact()
    with pytest.raises(AttributeError):
        cfg.n = 2
    other = cfg.replace(gamma=3.0)
    assert other.gamma == 3.0 and cfg.gamma == 0.0
    assert PulseConfig(**cfg.as_dict()) == cfg


def test_envelope_values():
    assert envelope(1, 1.0, 0.0) == 1.0
    assert envelope(2, 1.0, 0.25) == pytest.approx(0.5, abs=1e-15)
    # exactly zero at and beyond the support edge
    assert envelope(3, 1.0, 0.5) == 0.0
    assert envelope(3, 1.0, -0.7) == 0.0
    grid = np.linspace(-1, 1, 11)
    assert envelope(1, 2.0, grid).shape == grid.shape


@pytest.mark.parametrize("n", range(1, 9))
def test_envelope_derivatives_match_finite_differences(n):
    tau, h = 1.3, 1e-5
    for x in (-0.41, -0.2, 0.0, 0.17, 0.52):
        f, d1, d2 = envelope_derivs(n, tau, x)
        fp, fm = envelope(n, tau, x + h), envelope(n, tau, x - h)
        assert f == pytest.approx(envelope(n, tau, x), abs=1e-15)
        assert d1 == pytest.approx((fp - fm) / (2 * h), rel=1e-7, abs=1e-7)
        assert d2 == pytest.approx((fp - 2 * f + fm) / h**2, rel=1e-4, abs=1e-3)


def test_edge_derivative_is_inside_limit():
    tau = 1.0
    # n=1 slope at switch-on equals pi/tau in magnitude
    _, d1, _ = envelope_derivs(1, tau, -0.5 * tau)
    assert d1 == pytest.approx(math.pi / tau, rel=1e-15)
    _, d1, d2 = envelope_derivs(2, tau, 0.5 * tau)
    assert d1 == 0.0
    assert d2 == pytest.approx(2 * math.pi**2 / tau**2, rel=1e-12)


def test_window_and_switch_times():
    cfg = PulseConfig(n=2, tau=2.0, t_d=0.6, omega_p0=1.0, omega_s0=1.0)
    win = interaction_window(cfg)
    assert (win.t_i, win.t_f) == (-0.7, 0.7)
    assert win.duration == pytest.approx(1.4)
    assert field_span(cfg) == (-1.3, 1.3)
    assert switch_times(cfg) == [-1.3, -0.7, 0.7, 1.3]
    no_overlap = cfg.replace(t_d=3.0)
    assert not interaction_window(no_overlap).overlap
    with pytest.raises(DegenerateField):
        endpoint_frames(no_overlap)


def test_counterintuitive_order():
    cfg = exact()
    p, s = rabi_pair(cfg, -0.6)
    assert p == 0.0 and s > 0.0
    p, s = rabi_pair(cfg, 0.6)
    assert p > 0.0 and s == 0.0


def test_exact_case_frame_is_uniform():
    cfg = exact(omega=7.0, tau=2.0)
    for t in np.linspace(-0.5, 0.5, 9):
        fr = window_frame(cfg, t)
        assert fr.omega == pytest.approx(7.0, rel=1e-13)
        assert fr.theta_dot == pytest.approx(math.pi / 2.0, rel=1e-12)
        assert fr.theta_ddot == pytest.approx(0.0, abs=1e-9)
        assert fr.omega_dot == pytest.approx(0.0, abs=1e-9)
    fi, ff = endpoint_frames(cfg)
    assert fi.theta == 0.0 and ff.theta == pytest.approx(math.pi / 2, abs=1e-15)
    assert is_exact_case(cfg) and not is_exact_case(cfg.replace(n=2))


def test_mixing_frame_degenerate_outside_fields():
    with pytest.raises(DegenerateField):
        mixing_frame(exact(), 5.0)


def test_adiabaticity():
    assert adiabaticity(exact(omega=20.0)) == pytest.approx(0.05, rel=1e-12)
    cfg = PulseConfig(n=1, tau=1.0, t_d=0.5, omega_p0=10.0, omega_s0=50.0)
    # the Stokes peak dominates: max Omega is at least omega_s0
    assert 1.0 / (adiabaticity(cfg) * cfg.tau) >= 50.0 - 1e-9


@settings(max_examples=60, deadline=None)
@given(configs, st.floats(0.0, 1.0))
def test_frame_properties(cfg, u):
    win = interaction_window(cfg)
    t = win.t_i + u * (win.t_f - win.t_i)
    fr = window_frame(cfg, t)
    assert 0.0 <= fr.theta <= math.pi / 2 + 1e-15
    assert fr.omega > 0.0
    assert fr.omega_tilde >= fr.omega
    p, s = rabi_scalar(cfg, t)
    assert math.hypot(p, s) == pytest.approx(fr.omega, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(configs, st.floats(0.05, 0.95))
def test_theta_dot_matches_finite_difference(cfg, u):
    win = interaction_window(cfg)
    t = win.t_i + u * (win.t_f - win.t_i)
    h = 1e-6 * cfg.tau
    fp, fm, f0 = mixing_frame(cfg, t + h), mixing_frame(cfg, t - h), mixing_frame(cfg, t)
    scale = 1.0 / cfg.tau
    assert f0.theta_dot == pytest.approx((fp.theta - fm.theta) / (2 * h), rel=1e-5, abs=1e-6 * scale)
    assert f0.omega_dot == pytest.approx((fp.omega - fm.omega) / (2 * h), rel=1e-5,
                                         abs=1e-6 * f0.omega * scale)
    assert f0.theta_ddot == pytest.approx((fp.theta_dot - fm.theta_dot) / (2 * h), rel=1e-4,
                                          abs=1e-5 * scale**2)
