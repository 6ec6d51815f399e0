import math

import numpy as np
import pytest

from magnon_benchkit.dsp import node_extinction_db, node_period
from magnon_benchkit.dynamics import (
    CoupledEquations,
    DrivePulse,
    StepSizeError,
    extract_lifetime,
    generalized_rabi_frequency,
    lifetime_from_energy,
    max_step,
    rabi_period,
    ringdown_map,
    simulate,
)
from magnon_benchkit.physics import DomainError
from magnon_benchkit.spectra import normal_modes_rwa, reflection

MHZ = 2 * math.pi * 1e6
GHZ = 2 * math.pi * 1e9
NS = 1e-9


def test_lossless_exchange_conserves_excitations():
    g = 10 * MHZ
    eq = CoupledEquations(omega_a=7 * GHZ, omega_m=7 * GHZ, kappa_a=0, kappa_a1=0, kappa_m=0, g=g)
    trace = simulate(eq, None, t_max=10 * rabi_period(g), dt=0.01 / g)
    assert np.max(np.abs(trace.excitations - 1.0)) < 1e-8
    np.testing.assert_allclose(trace.energy, np.cos(g * trace.t) ** 2, atol=1e-6)


def test_rabi_nodes_in_strong_coupling(strong_system):
    dt = 0.25 * max_step(strong_system)
    trace = simulate(strong_system, None, t_max=300 * NS, dt=dt)
    period = node_period(trace.t, trace.energy)
    assert period == pytest.approx(rabi_period(strong_system.g), rel=1e-2)
    assert rabi_period(strong_system.g) / NS == pytest.approx(46.296, rel=1e-4)
    assert node_extinction_db(trace.energy) > 20.0


def test_purcell_lifetime_follows_slow_mode(purcell_system):
    dt = 0.25 * max_step(purcell_system)
    trace = simulate(purcell_system, None, t_max=250 * NS, dt=dt)
    fit = extract_lifetime(trace, (30 * NS, 200 * NS))
    modes = normal_modes_rwa(purcell_system)
    slow = min(-modes.omega_plus.imag, -modes.omega_minus.imag)
    assert fit.tau == pytest.approx(1 / (2 * slow), rel=2e-2)
    assert fit.tau / NS == pytest.approx(35.8, rel=2e-2)
    assert not fit.poor_fit


def test_bare_cavity_lifetime(purcell_system):
    bare = purcell_system.with_coupling(0.0)
    dt = 0.25 * max_step(bare)
    trace = simulate(bare, None, t_max=250 * NS, dt=dt)
    fit = extract_lifetime(trace, (30 * NS, 200 * NS))
    assert fit.tau / NS == pytest.approx(74.37, rel=1e-3)
    assert fit.r_squared > 0.9999


def test_driven_steady_state_matches_reflection(strong_system):
    carrier = strong_system.cavity.omega_a + 5 * MHZ
    pulse = DrivePulse(
        carrier=carrier, amplitude=1.0, t_on=0.0, t_off=1100 * NS, shape="rectangular"
    )
    dt = 0.25 * max_step(strong_system, carrier)
    trace = simulate(strong_system, pulse, t_max=1050 * NS, dt=dt)
    assert abs(trace.out[-1] - reflection(strong_system, carrier)) < 1e-4


def test_step_limit_enforced(strong_system):
    limit = max_step(strong_system)
    with pytest.raises(StepSizeError):
        simulate(strong_system, None, t_max=100 * NS, dt=2 * limit)


def test_ringdown_map_rows_match_single_runs(strong_system):
    b0 = strong_system.bias_field
    b = [b0 - 2e-4, b0, b0 + 2e-4]
    dt = 0.25 * min(max_step(strong_system.with_bias(x)) for x in b)
    serial = ringdown_map(strong_system, None, b, t_max=50 * NS, dt=dt, decimate=4)
    pooled = ringdown_map(strong_system, None, b, t_max=50 * NS, dt=dt, decimate=4, workers=2)
    assert serial.energy.shape == (3, serial.t.size)
    np.testing.assert_array_equal(serial.energy, pooled.energy)
    single = simulate(strong_system.with_bias(b[1]), None, t_max=50 * NS, dt=dt, decimate=4)
    np.testing.assert_allclose(serial.energy[1], single.energy)


def test_oscillating_window_is_flagged(strong_system):
    dt = 0.25 * max_step(strong_system)
    trace = simulate(strong_system, None, t_max=200 * NS, dt=dt)
    assert extract_lifetime(trace).poor_fit


def test_lifetime_input_errors():
    t = np.linspace(0, 1e-6, 101)
    with pytest.raises(DomainError):
        lifetime_from_energy(t, np.ones_like(t))
    with pytest.raises(DomainError):
        lifetime_from_energy(t, np.exp(-t / 1e-7), window=(0.0, 2e-6))
    with pytest.raises(DomainError):
        lifetime_from_energy(t, np.exp(-t / 1e-7), window=(0.0, 2e-8))
    fit = lifetime_from_energy(t, np.exp(-t / 1e-7))
    assert fit.tau == pytest.approx(1e-7, rel=1e-9)


def test_pulse_envelope():
    pulse = DrivePulse(carrier=1.0, amplitude=2.0, t_on=1.0, t_off=5.0, edge_time=1.0)
    assert pulse.envelope(0.5) == 0.0
    assert pulse.envelope(1.5) == pytest.approx(1.0)
    assert pulse.envelope(3.0) == 2.0
    assert pulse.envelope(5.0) == 0.0
    with pytest.raises(ValueError):
        DrivePulse(carrier=1.0, amplitude=1.0, t_on=0.0, t_off=1.0, shape="gaussian")


def test_rabi_helpers():
    assert generalized_rabi_frequency(3.0, 0.0) == 6.0
    assert generalized_rabi_frequency(3.0, 8.0) == 10.0
    with pytest.raises(DomainError):
        rabi_period(0.0)


def test_excitation_number_decays_at_mode_rates(strong_system):
    dt = 0.01 / strong_system.g
    trace = simulate(strong_system, None, t_max=50 * NS, dt=dt)
    n = np.abs(trace.a) ** 2 + np.abs(trace.m) ** 2
    # fourth-order central difference
    slope = (-n[4:] + 8 * n[3:-1] - 8 * n[1:-3] + n[:-4]) / (12 * dt)
    ka = strong_system.cavity.kappa_a
    km = strong_system.magnon.kappa_m
    expected = -2 * ka * np.abs(trace.a[2:-2]) ** 2 - 2 * km * np.abs(trace.m[2:-2]) ** 2
    assert np.max(np.abs(slope - expected)) < 1e-6 * np.max(np.abs(expected))


def test_finite_pulse_breaks_bias_symmetry(strong_system):
    b0 = strong_system.bias_field
    offset = 5 * MHZ / strong_system.magnon.gamma
    b = [b0 - offset, b0 + offset]
    carrier = strong_system.cavity.omega_a + 2 * MHZ
    pulse = DrivePulse(carrier=carrier, amplitude=1.0, t_on=0.0, t_off=20 * NS)
    dt = 0.25 * min(max_step(strong_system.with_bias(x), carrier) for x in b)
    driven = ringdown_map(strong_system, pulse, b, t_max=150 * NS, dt=dt)
    spread = np.max(np.abs(driven.energy[0] - driven.energy[1]))
    assert spread > 1e-2 * np.max(driven.energy)

    dt = 0.25 * min(max_step(strong_system.with_bias(x)) for x in b)
    impulse = ringdown_map(strong_system, None, b, t_max=150 * NS, dt=dt)
    np.testing.assert_allclose(impulse.energy[0], impulse.energy[1], rtol=1e-6, atol=1e-12)
