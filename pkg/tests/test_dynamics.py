import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import stirap.dynamics as dyn
from oracles import exact_case_n3
from stirap.dynamics import (
    GROUND,
    BedState,
    IntegratorSettings,
    StateVector,
    bed_hamiltonian,
    eta_from_bed,
    from_bed,
    hamiltonian,
    n3_ode,
    propagate,
    to_bed,
)
from stirap.errors import DarkDepleted, StepFailure
from stirap.pulses import PulseConfig, field_span, interaction_window, window_frame


def exact(omega=20.0, gamma=0.0):
    return PulseConfig(n=1, tau=1.0, t_d=0.5, omega_p0=omega, omega_s0=omega, gamma=gamma)


@pytest.mark.parametrize("omega", [5.0, 10.0, 20.0, 40.0])
@pytest.mark.parametrize("gamma", [0.0, 10.0])
def test_exact_case_against_matrix_exponential(omega, gamma):
    res = n3_ode(exact(omega, gamma))
    assert res.n3 == pytest.approx(exact_case_n3(omega, 1.0, gamma), abs=1e-9)
    assert res.method == "ode"


def test_fixed_step_cross_check():
    cfg = PulseConfig(n=2, tau=1.0, t_d=0.5, omega_p0=30.0, omega_s0=60.0, gamma=3.0)
    a = n3_ode(cfg).n3
    b = n3_ode(cfg, IntegratorSettings(method="rk4", fixed_steps=8000, sample_count=2)).n3
    assert a == pytest.approx(b, abs=1e-9)


def test_hamiltonian_structure():
    cfg = exact(gamma=2.0)
    h = hamiltonian(cfg, 0.0)
    assert h[1, 1] == -1j
    assert np.allclose(h.real, h.real.T)
    # bed Hamiltonian: anti-Hermitian part is only the decay term
    hb = bed_hamiltonian(cfg, 0.0)
    skew = hb - hb.conj().T
    assert np.allclose(skew, np.diag([0, -2j, 0]))


def test_bed_transform_roundtrip():
    cfg = PulseConfig(n=3, tau=1.0, t_d=0.4, omega_p0=3.0, omega_s0=5.0)
    psi = StateVector(0.3 + 0.1j, -0.2j, 0.5)
    fr = window_frame(cfg, 0.05)
    back = from_bed(cfg, 0.05, to_bed(cfg, 0.05, psi, fr), fr)
    assert np.allclose(back.as_array(), psi.as_array(), atol=1e-15)
    assert to_bed(cfg, 0.05, psi, fr).norm2 == pytest.approx(psi.norm2)


def test_dark_state_has_no_excited_or_bright_part():
    cfg = PulseConfig(n=1, tau=1.0, t_d=0.5, omega_p0=3.0, omega_s0=5.0)
    fr = window_frame(cfg, 0.1)
    dark = from_bed(cfg, 0.1, BedState(0, 0, 1), fr)
    h = hamiltonian(cfg, 0.1)
    assert np.allclose(h @ dark.as_array(), 0.0, atol=1e-14)


def test_eta_from_bed():
    eb, ee, ed = eta_from_bed(BedState(0.2, 0.1j, 0.5))
    assert eb == pytest.approx(0.4) and ee == pytest.approx(0.2j)
    assert ed == pytest.approx(math.log(0.5))
    with pytest.raises(DarkDepleted):
        eta_from_bed(BedState(1.0, 0.0, 0.0))


def test_norm_conserved_without_decay():
    cfg = PulseConfig(n=2, tau=1.0, t_d=0.5, omega_p0=25.0, omega_s0=40.0)
    traj = propagate(cfg, *field_span(cfg))
    norms = np.sum(traj.populations(), axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-9


def test_norm_monotone_with_decay():
    cfg = exact(20.0, 15.0)
    traj = propagate(cfg, *field_span(cfg), settings=IntegratorSettings(sample_count=801))
    norms = np.sum(traj.populations(), axis=1)
    assert np.all(np.diff(norms) <= 1e-12)
    assert norms[-1] < 1.0


def test_bed_and_bare_routes_agree():
    cfg = PulseConfig(n=2, tau=1.0, t_d=0.5, omega_p0=12.0, omega_s0=30.0, gamma=4.0)
    a = n3_ode(cfg, basis="bare").n3
    b = n3_ode(cfg, basis="bed").n3
    assert a == pytest.approx(b, abs=1e-8)


def test_population_frozen_after_stokes_switch_off():
    res = n3_ode(PulseConfig(n=1, tau=1.0, t_d=0.5, omega_p0=8.0, omega_s0=16.0))
    assert res.diagnostics["n3_end"] == pytest.approx(res.n3, abs=1e-9)
    assert not res.warnings


def test_no_overlap_reads_at_end():
    cfg = PulseConfig(n=1, tau=1.0, t_d=1.5, omega_p0=10.0, omega_s0=10.0)
    res = n3_ode(cfg)
    # without overlap the Stokes pulse acts on an empty level and nothing is transferred
    assert res.n3 == pytest.approx(0.0, abs=1e-12)


def test_trajectory_csv(tmp_path):
    cfg = exact(10.0)
    traj = propagate(cfg, *field_span(cfg), settings=IntegratorSettings(sample_count=11))
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3", "n1", "n2", "n3"]
    assert len(rows) == 12
    last = [float(v) for v in rows[-1]]
    assert last[9] == pytest.approx(traj.populations()[-1, 2], abs=0.0)
    assert traj.state_at(traj.times[3]) == traj.samples[3][1]
    with pytest.raises(KeyError):
        traj.state_at(123.0)


def test_propagate_argument_checks():
    cfg = exact()
    with pytest.raises(ValueError):
        propagate(cfg, 1.0, 0.0)
    with pytest.raises(ValueError):
        propagate(cfg, 0.0, 1.0, basis="dressed")
    with pytest.raises(ValueError):
        propagate(cfg, 0.0, 1.0, psi0=StateVector(1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        IntegratorSettings(rel_tol=0.0)


def test_solver_failure_maps_to_step_failure(monkeypatch):
    class Failed:
        status = -1
        message = "step size too small"

    monkeypatch.setattr(dyn, "solve_ivp", lambda *a, **k: Failed())
    with pytest.raises(StepFailure, match="step size"):
        n3_ode(exact())


def test_extra_times_land_on_grid():
    cfg = exact()
    win = interaction_window(cfg)
    traj = propagate(cfg, -0.75, 0.75, settings=IntegratorSettings(sample_count=3),
                     extra_times=(win.t_i, 0.1234))
    assert 0.1234 in traj.times and win.t_i in traj.times
    assert traj.state_at(-0.75) == GROUND


@settings(max_examples=15, deadline=None)
@given(
    n=st.integers(1, 4),
    wp=st.floats(1.0, 40.0),
    ws=st.floats(1.0, 40.0),
    gamma=st.floats(0.0, 20.0),
)
def test_populations_stay_physical(n, wp, ws, gamma):
    cfg = PulseConfig(n=n, tau=1.0, t_d=0.5, omega_p0=wp, omega_s0=ws, gamma=gamma)
    res = n3_ode(cfg)
    total = res.n3 + res.diagnostics["n1"] + res.diagnostics["n2"]
    assert 0.0 <= res.n3 <= 1.0 + 1e-9
    assert total <= 1.0 + 1e-9
    if gamma == 0.0:
        assert total == pytest.approx(1.0, abs=1e-9)
