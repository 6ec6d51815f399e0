import math

import numpy as np
import pytest

from magnon_benchkit.config import SweepConfig
from magnon_benchkit.dynamics import max_step, simulate
from magnon_benchkit.physics import DesignPoint
from magnon_benchkit.sweeps import (
    bias_points,
    build_points,
    design_table,
    drive_pulse,
    feature_scale,
    frequency_grid,
    map_table,
    position_table,
    spectrum_table,
    time_grid,
    trace_table,
)

MHZ = 2 * math.pi * 1e6
GHZ = 2 * math.pi * 1e9
NS = 1e-9


def test_build_points_linear_and_log():
    lin = build_points(start=1.0, stop=2.0, points=5)
    assert np.allclose(lin, [1.0, 1.25, 1.5, 1.75, 2.0])
    log = build_points(start=1.0, stop=100.0, points=3, mode="log")
    assert np.allclose(log, [1.0, 10.0, 100.0])


@pytest.mark.parametrize(
    "kwargs, message",
    [
        (dict(start=1.0, stop=2.0, points=1), "points must be >= 2"),
        (dict(start=2.0, stop=1.0, points=5), "stop must be > start"),
        (dict(start=1.0, stop=2.0, points=5, mode="cubic"), "mode must be"),
        (dict(start=0.0, stop=2.0, points=5, mode="log"), "start > 0"),
    ],
)
def test_build_points_errors(kwargs, message):
    with pytest.raises(ValueError, match=message):
        build_points(**kwargs)


def test_default_grid_covers_features(strong_system):
    grid = frequency_grid(SweepConfig(freq_points=101), strong_system)
    half = 5 * feature_scale(strong_system)
    assert grid.points == 101
    assert grid.start == pytest.approx(strong_system.cavity.omega_a - half)
    assert grid.stop == pytest.approx(strong_system.cavity.omega_a + half)
    explicit = frequency_grid(SweepConfig(freq_start=7.8 * GHZ, freq_stop=7.9 * GHZ), strong_system)
    assert explicit.start == 7.8 * GHZ
    with pytest.raises(ValueError):
        frequency_grid(SweepConfig(freq_start=7.8 * GHZ), strong_system)


def test_default_bias_points_centre_on_resonance(strong_system):
    b = bias_points(SweepConfig(b_points=5), strong_system)
    assert b[2] == pytest.approx(strong_system.resonant_field)
    assert b.size == 5


def test_drive_pulse_from_sweep(strong_system):
    assert drive_pulse(SweepConfig(), strong_system) is None
    sweep = SweepConfig(pulse="raised-cosine", pulse_off=10 * NS, carrier_offset=1 * MHZ)
    pulse = drive_pulse(sweep, strong_system)
    assert pulse.carrier == pytest.approx(strong_system.cavity.omega_a + 1 * MHZ)
    assert pulse.t_off == 10 * NS


def test_default_time_grid(strong_system):
    t_max, dt = time_grid(SweepConfig(), strong_system, None)
    slowest = 0.5 * (2.67 + 2.13) * MHZ
    assert t_max == pytest.approx(5 / (2 * slowest))
    assert dt <= 0.25 * max_step(strong_system)
    b0 = strong_system.bias_field
    _, dt_map = time_grid(SweepConfig(), strong_system, None, b_values=[b0 - 5e-3, b0])
    assert dt_map <= 0.25 * max_step(strong_system.with_bias(b0 - 5e-3))


def test_spectrum_table_columns(strong_system):
    grid = frequency_grid(SweepConfig(freq_points=201), strong_system)
    table = spectrum_table(strong_system, grid)
    assert table.names == ("freq", "power", "phase", "delay")
    assert table.rows.shape == (201, 4)
    assert table.column("freq")[0] == pytest.approx(grid.start / GHZ)
    noisy = spectrum_table(strong_system, grid, noise=0.01, seed=1)
    assert "noise" in noisy.comments[0]
    np.testing.assert_array_equal(noisy.column("phase"), table.column("phase"))


def test_map_table_is_long_format(strong_system):
    grid = frequency_grid(SweepConfig(freq_points=11), strong_system)
    b = [0.28, 0.281, 0.282]
    table = map_table(strong_system, b, grid)
    assert table.rows.shape == (33, 3)
    assert table.column("b")[0] == pytest.approx(280.0)
    assert table.column("b")[11] == pytest.approx(281.0)


def test_trace_table(strong_system):
    trace = simulate(strong_system, None, t_max=20 * NS, dt=0.25 * max_step(strong_system))
    table = trace_table(trace, ["impulse"])
    assert table.names == ("t", "energy", "out_power", "magnon_energy")
    assert table.column("energy")[0] == 1.0
    assert table.comments == ("impulse",)


def test_design_and_position_tables():
    point = DesignPoint(
        diameter=2.5e-3,
        scale=1.0,
        omega_a=37.5 * GHZ,
        mode_volume=112e-9,
        spins=3.45e19,
        f_eff=2.739e9,
        g=3.07e3 * MHZ,
    )
    table = design_table([point])
    assert table.column("diameter")[0] == pytest.approx(2.5)
    assert table.column("mode_volume")[0] == pytest.approx(112.0)
    assert table.column("g")[0] == pytest.approx(3070.0)
    rows = position_table([(1e-3, 0.9, 5 * MHZ)])
    assert rows.column("x")[0] == pytest.approx(1.0)
    assert rows.column("g")[0] == pytest.approx(5.0)
